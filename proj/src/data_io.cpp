#include "sps/data_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "sps/error.hpp"

namespace sps {

namespace {

// Dimensions and modal g of the benchmark datasets.
constexpr const char* kBuiltinRegistry = R"({
  "version": 1,
  "datasets": [
    {"name": "Diabetes",       "T": 768,  "k": 13, "C": 2, "modal_g": 0.25},
    {"name": "Heart",          "T": 270,  "k": 19, "C": 2, "modal_g": 0.25},
    {"name": "Australia",      "T": 690,  "k": 35, "C": 2, "modal_g": 0.25},
    {"name": "Germany",        "T": 1000, "k": 42, "C": 2, "modal_g": 0.0625},
    {"name": "Cars",           "T": 263,  "k": 4,  "C": 3, "modal_g": 0.25},
    {"name": "Caesarean 1",    "T": 251,  "k": 8,  "C": 3, "modal_g": 0.25},
    {"name": "Caesarean 2",    "T": 251,  "k": 4,  "C": 3, "modal_g": 1.0, "supplement": true},
    {"name": "Transportation", "T": 210,  "k": 9,  "C": 4, "modal_g": 1.0}
  ]
})";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& field, int line, int column) {
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw Error(ErrorKind::data, fmt::format("line {}, column {}: '{}' is not a number", line, column, field));
  }
  return value;
}

}  // namespace

std::map<std::string, DatasetSpec> parse_registry(const std::string& text) {
  std::map<std::string, DatasetSpec> out;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.value("version", -1) != 1) {
      throw Error(ErrorKind::config, "registry manifest version must be 1");
    }
    for (const auto& entry : doc.at("datasets")) {
      DatasetSpec spec;
      spec.name = entry.at("name").get<std::string>();
      spec.observations = entry.at("T").get<int>();
      spec.covariates = entry.at("k").get<int>();
      spec.categories = entry.at("C").get<int>();
      spec.modal_g = entry.at("modal_g").get<double>();
      spec.supplement = entry.value("supplement", false);
      spec.intercept = entry.value("intercept", false);
      out.emplace(spec.name, spec);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, fmt::format("malformed registry manifest: {}", e.what()));
  }
  return out;
}

const std::map<std::string, DatasetSpec>& builtin_registry() {
  static const auto registry = parse_registry(kBuiltinRegistry);
  return registry;
}

std::map<std::string, DatasetSpec> load_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, fmt::format("cannot open registry '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_registry(buffer.str());
}

DatasetSpec registry_spec(const std::map<std::string, DatasetSpec>& registry, const std::string& name) {
  const auto it = registry.find(name);
  if (it == registry.end()) {
    std::string known;
    for (const auto& [key, _] : registry) known += (known.empty() ? "" : ", ") + key;
    throw Error(ErrorKind::config, fmt::format("unknown dataset '{}' (known: {})", name, known));
  }
  return it->second;
}

LogitData load_csv(const std::string& path, const DatasetSpec& spec) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::data, fmt::format("cannot open '{}'", path));

  std::vector<int> labels;
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && spec.header) continue;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() < 2) {
      throw Error(ErrorKind::data, fmt::format("{}: line {}: need an outcome and at least one covariate", path, line_no));
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw Error(ErrorKind::data,
                  fmt::format("{}: line {}: {} fields, expected {}", path, line_no, fields.size(), width));
    }
    int label = 0;
    const auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), label);
    if (fields[0].empty() || ec != std::errc() || ptr != fields[0].data() + fields[0].size()) {
      throw Error(ErrorKind::data, fmt::format("{}: line {}: outcome '{}' is not an integer label", path, line_no,
                                               fields[0]));
    }
    labels.push_back(label);
    std::vector<double> row;
    row.reserve(fields.size());
    if (spec.intercept) row.push_back(1.0);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      row.push_back(parse_double(fields[c], line_no, static_cast<int>(c) + 1));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::data, fmt::format("{}: no observations", path));

  int categories = spec.categories.value_or(0);
  if (!spec.categories) {
    for (int y : labels) categories = std::max(categories, y);
  }
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels[t] < 1 || labels[t] > categories) {
      throw Error(ErrorKind::data,
                  fmt::format("{}: observation {}: label {} outside 1..{}", path, t + 1, labels[t], categories));
    }
  }

  const auto T = static_cast<Eigen::Index>(rows.size());
  const auto k = static_cast<Eigen::Index>(rows.front().size());
  if (spec.observations && *spec.observations != T) {
    throw Error(ErrorKind::data, fmt::format("{}: {} observations, dataset '{}' expects T = {}", path, T, spec.name,
                                             *spec.observations));
  }
  if (spec.covariates && *spec.covariates != k) {
    throw Error(ErrorKind::data,
                fmt::format("{}: {} covariates, dataset '{}' expects k = {}", path, k, spec.name, *spec.covariates));
  }
  RowMatrix X(T, k);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (Eigen::Index i = 0; i < k; ++i) X(t, i) = rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
  }
  return make_logit_data(std::move(labels), std::move(X), categories);
}

RowMatrix design_supplement(const RowMatrix& X, const DatasetSpec& spec, std::vector<std::string>* warnings) {
  if (!spec.supplement) return X;
  std::vector<Eigen::Index> empty;
  for (Eigen::Index i = 0; i < X.cols(); ++i) {
    if ((X.col(i).array() == 0.0).all()) empty.push_back(i);
  }
  if (empty.empty()) {
    if (warnings) {
      warnings->push_back(fmt::format("design supplement requested for '{}' but no empty cell found; using X as is",
                                      spec.name));
    }
    return X;
  }
  RowMatrix out(X.rows() + 1, X.cols());
  out.topRows(X.rows()) = X;
  out.row(X.rows()).setZero();
  for (auto i : empty) out(X.rows(), i) = 1.0;
  return out;
}

}  // namespace sps
