#include "sps/report_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "sps/error.hpp"

namespace sps {

using nlohmann::json;

namespace {

json moment_to_json(const MomentSummary& m) {
  return json{{"name", m.name},
              {"mean", m.mean},
              {"sd", m.sd},
              {"nse", m.nse},
              {"rne", m.rne ? json(*m.rne) : json(nullptr)},
              {"rne_defined", m.rne.has_value()},
              {"dof", m.dof},
              {"group_means", m.group_means}};
}

MomentSummary moment_from_json(const json& j) {
  MomentSummary m;
  m.name = j.at("name").get<std::string>();
  m.mean = j.at("mean").get<double>();
  m.sd = j.at("sd").get<double>();
  m.nse = j.at("nse").get<double>();
  if (!j.at("rne").is_null()) m.rne = j.at("rne").get<double>();
  m.dof = j.at("dof").get<int>();
  m.group_means = j.at("group_means").get<std::vector<double>>();
  return m;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double finite_or_inf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

void check_header(const json& doc, const char* format, int version) {
  if (!doc.is_object() || doc.value("format", std::string{}) != format) {
    throw Error(ErrorKind::config, fmt::format("document is not an {} file", format));
  }
  const int found = doc.value("version", -1);
  if (found != version) {
    throw Error(ErrorKind::config, fmt::format("{} version {} is not supported (expected {})", format, found, version));
  }
}

}  // namespace

json report_to_json(const RunReport& report) {
  json functionals = json::array();
  for (const auto& m : report.functionals) functionals.push_back(moment_to_json(m));
  json monitors = json::array();
  for (const auto& m : report.monitors) monitors.push_back(moment_to_json(m));
  json cycles = json::array();
  for (const auto& c : report.log_ml.cycles) {
    cycles.push_back({{"t_end", c.t_end}, {"log_mean_weight", c.log_mean_weight}, {"cumulative", c.cumulative}});
  }
  return json{{"format", "sps-report"},
              {"version", kReportVersion},
              {"algorithm", report.algorithm},
              {"groups", report.groups},
              {"particles", report.particles},
              {"seed", report.seed},
              {"resampling", report.resampling},
              {"functionals", functionals},
              {"monitors", monitors},
              {"log_ml",
               {{"value", report.log_ml.log_ml},
                {"nse", report.log_ml.nse},
                {"cycles", cycles},
                {"group_cumulative", report.log_ml.group_cumulative}}},
              {"schedule",
               {{"cycles", report.schedule.cycles},
                {"breakpoints", report.schedule.breakpoints},
                {"steps", report.schedule.steps},
                {"total_m_steps", report.schedule.total_m_steps},
                {"final_h", report.schedule.final_h}}},
              {"warnings", report.warnings}};
}

RunReport report_from_json(const json& doc) {
  check_header(doc, "sps-report", kReportVersion);
  try {
    RunReport r;
    r.algorithm = doc.at("algorithm").get<std::string>();
    r.groups = doc.at("groups").get<int>();
    r.particles = doc.at("particles").get<int>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.resampling = doc.at("resampling").get<std::string>();
    for (const auto& m : doc.at("functionals")) r.functionals.push_back(moment_from_json(m));
    for (const auto& m : doc.at("monitors")) r.monitors.push_back(moment_from_json(m));
    const auto& ml = doc.at("log_ml");
    r.log_ml.log_ml = ml.at("value").get<double>();
    r.log_ml.nse = ml.at("nse").get<double>();
    r.log_ml.group_cumulative = ml.at("group_cumulative").get<std::vector<double>>();
    for (const auto& c : ml.at("cycles")) {
      r.log_ml.cycles.push_back({c.at("t_end").get<int>(), c.at("log_mean_weight").get<double>(),
                                 c.at("cumulative").get<double>()});
    }
    const auto& s = doc.at("schedule");
    r.schedule.cycles = s.at("cycles").get<int>();
    r.schedule.breakpoints = s.at("breakpoints").get<std::vector<int>>();
    r.schedule.steps = s.at("steps").get<std::vector<int>>();
    r.schedule.total_m_steps = s.at("total_m_steps").get<int>();
    r.schedule.final_h = s.at("final_h").get<double>();
    r.warnings = doc.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, fmt::format("malformed report: {}", e.what()));
  }
}

json schedule_to_json(const CycleSchedule& schedule) {
  json cycles = json::array();
  for (const auto& c : schedule.cycles) {
    json matrices = json::array();
    for (const auto& sigma : c.proposal_cov) {
      std::vector<double> flat;
      flat.reserve(static_cast<std::size_t>(sigma.size()));
      for (Eigen::Index r = 0; r < sigma.rows(); ++r) {
        for (Eigen::Index k = 0; k < sigma.cols(); ++k) flat.push_back(sigma(r, k));
      }
      matrices.push_back(std::move(flat));
    }
    json rne = json::array();
    for (double x : c.min_rne) rne.push_back(finite_or_null(x));
    cycles.push_back({{"t_end", c.t_end},
                      {"steps", c.steps},
                      {"ess", c.ess},
                      {"h", c.h},
                      {"acceptance", c.acceptance},
                      {"min_rne", rne},
                      {"proposal_cov", matrices}});
  }
  return json{{"format", "sps-schedule"},
              {"version", kScheduleVersion},
              {"observations", schedule.observations},
              {"dim", schedule.dim},
              {"breakpoints", schedule.breakpoints},
              {"cycles", cycles}};
}

CycleSchedule schedule_from_json(const json& doc) {
  check_header(doc, "sps-schedule", kScheduleVersion);
  try {
    CycleSchedule s;
    s.observations = doc.at("observations").get<int>();
    s.dim = doc.at("dim").get<int>();
    s.breakpoints = doc.at("breakpoints").get<std::vector<int>>();
    const auto d = static_cast<Eigen::Index>(s.dim);
    for (const auto& c : doc.at("cycles")) {
      CycleRecord rec;
      rec.t_end = c.at("t_end").get<int>();
      rec.steps = c.at("steps").get<int>();
      rec.ess = c.at("ess").get<double>();
      rec.h = c.at("h").get<std::vector<double>>();
      rec.acceptance = c.at("acceptance").get<std::vector<double>>();
      for (const auto& x : c.at("min_rne")) rec.min_rne.push_back(finite_or_inf(x));
      for (const auto& flat_json : c.at("proposal_cov")) {
        const auto flat = flat_json.get<std::vector<double>>();
        if (static_cast<Eigen::Index>(flat.size()) != d * d) {
          throw Error(ErrorKind::config,
                      fmt::format("schedule: proposal matrix has {} entries, expected {}", flat.size(), d * d));
        }
        Matrix sigma(d, d);
        for (Eigen::Index r = 0; r < d; ++r) {
          for (Eigen::Index k = 0; k < d; ++k) sigma(r, k) = flat[static_cast<std::size_t>(r * d + k)];
        }
        rec.proposal_cov.push_back(std::move(sigma));
      }
      s.cycles.push_back(std::move(rec));
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, fmt::format("malformed schedule: {}", e.what()));
  }
}

std::string render_report(const json& doc) {
  const RunReport r = report_from_json(doc);
  std::string out;
  out += fmt::format("{} SPS, J = {}, N = {}, {} resampling, seed {}\n", r.algorithm, r.groups, r.particles,
                     r.resampling, r.seed);
  for (const auto& m : r.functionals) {
    out += fmt::format("{:<24}{:.4f} ({:.4f})\n", m.name, m.mean, m.sd);
    const std::string rne = m.rne ? fmt::format("{:.2f}", *m.rne) : std::string("rne: n/a");
    out += fmt::format("{:<24}[{:.5f}, {}]\n", "", m.nse, rne);
  }
  out += fmt::format("{:<24}{:.3f} [{:.3f}]\n", "log ML", r.log_ml.log_ml, r.log_ml.nse);
  out += fmt::format("{:<24}{}\n", "cycles", r.schedule.cycles);
  out += fmt::format("{:<24}{}\n", "M iterations", r.schedule.total_m_steps);
  out += fmt::format("{:<24}{:.2f}\n", "final h", r.schedule.final_h);
  for (const auto& w : r.warnings) out += fmt::format("warning: {}\n", w);
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, fmt::format("cannot open '{}'", path));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, fmt::format("'{}' is not valid JSON: {}", path, e.what()));
  }
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::config, fmt::format("cannot write '{}'", path));
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::config, fmt::format("failed writing '{}'", path));
}

}  // namespace sps
