#ifndef SPS_DATA_IO_HPP
#define SPS_DATA_IO_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sps/model_logit.hpp"

namespace sps {

struct DatasetSpec {
  std::string name;
  std::optional<int> observations;  ///< expected T
  std::optional<int> covariates;    ///< expected k, after any intercept is added
  std::optional<int> categories;    ///< expected C
  std::optional<double> modal_g;
  std::string path;
  bool header = false;      ///< skip the first line
  bool intercept = false;   ///< prepend a column of ones
  bool supplement = false;  ///< append an empty-cell row to the g-prior design
};

/// The benchmark datasets: name, T, k, C and the g with the highest marginal
/// likelihood.
const std::map<std::string, DatasetSpec>& builtin_registry();

/// Registry manifest: {"version": 1, "datasets": [{"name", "T", "k", "C",
/// "modal_g", "supplement"?, "intercept"?}]}.
std::map<std::string, DatasetSpec> load_registry(const std::string& path);
std::map<std::string, DatasetSpec> parse_registry(const std::string& text);

/// Throws Error(config) for unknown names.
DatasetSpec registry_spec(const std::map<std::string, DatasetSpec>& registry, const std::string& name);

/// Reads `path`: one observation per line, integer outcome in 1..C first, then
/// the covariates, comma separated. C comes from the spec when set, otherwise
/// it is the largest label. Throws Error(data) with the line number on ragged
/// rows, non-numeric fields, labels out of range or a dimension mismatch.
LogitData load_csv(const std::string& path, const DatasetSpec& spec);

/// Covariate matrix for g-prior construction only. With spec.supplement, one
/// row is appended carrying a 1 in every all-zero column (the empty cells of a
/// saturated indicator design). Without it, or when no empty cell exists, X is
/// returned unchanged; the latter adds a message to `warnings`.
RowMatrix design_supplement(const RowMatrix& X, const DatasetSpec& spec, std::vector<std::string>* warnings = nullptr);

}  // namespace sps

#endif
