#ifndef SPS_REPORT_IO_HPP
#define SPS_REPORT_IO_HPP

#include <string>

#include "json.hpp"

#include "sps/engine.hpp"

namespace sps {

inline constexpr int kReportVersion = 1;
inline constexpr int kScheduleVersion = 1;

/// Report document:
///   {"format": "sps-report", "version": 1, "algorithm", "groups", "particles",
///    "seed", "resampling",
///    "functionals": [{"name", "mean", "sd", "nse", "rne" (null if undefined),
///                     "rne_defined", "dof", "group_means"}],
///    "monitors": [...same...],
///    "log_ml": {"value", "nse", "cycles": [{"t_end", "log_mean_weight", "cumulative"}],
///               "group_cumulative"},
///    "schedule": {"cycles", "breakpoints", "steps", "total_m_steps", "final_h"},
///    "warnings": [...]}
nlohmann::json report_to_json(const RunReport& report);

/// Checks format and version; throws Error(config) on mismatch.
RunReport report_from_json(const nlohmann::json& doc);

/// Schedule document: {"format": "sps-schedule", "version": 1, "observations",
/// "dim", "breakpoints", "cycles": [{"t_end", "steps", "ess", "h", "acceptance",
/// "min_rne", "proposal_cov": [[d*d values, row-major], ...]}]}.
/// Undefined RNE (+inf) is written as null.
nlohmann::json schedule_to_json(const CycleSchedule& schedule);
CycleSchedule schedule_from_json(const nlohmann::json& doc);

/// Plain-text table: per functional "name  mean (sd)" then "[nse, rne]", the
/// log ML as "value [nse]", then cycle and M-iteration counts.
std::string render_report(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& doc);

}  // namespace sps

#endif
