#include "sps/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <optional>
#include <ostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "sps/data_io.hpp"
#include "sps/error.hpp"
#include "sps/oracle_ref.hpp"
#include "sps/report_io.hpp"

namespace sps {

namespace {

struct RunOptions {
  std::string data;
  std::string registry;
  std::string registry_file;
  bool header = false;
  bool intercept = false;
  bool supplement = false;
  int categories = 0;
  std::optional<double> g;
  int groups = 10;
  int particles = 1000;
  std::uint64_t seed = 0;
  std::string resampling = "residual";
  double ess = 0.5;
  double k_inter = 0.35;
  double k_final = 0.9;
  int max_m_steps = 1000;
  std::vector<std::string> monitors;
  std::vector<std::string> functionals;
  bool two_pass = false;
  std::string schedule_in;
  std::string schedule_out;
  int threads = 1;
  std::string out;
  bool quiet = false;
};

struct VerifyOptions {
  std::string toy = "binomial";
  std::uint64_t seed = 0;
  int groups = 10;
  int particles = 1000;
  int observations = 30;
  double g = 1.0;
  int threads = 1;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// "dir/report.json" + "pass1" -> "dir/report.pass1.json".
std::string with_suffix(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  const auto ext = p.has_extension() ? p.extension().string() : std::string(".json");
  p.replace_extension();
  return p.string() + "." + suffix + ext;
}

RunConfig make_config(const RunOptions& o, const LogitData& data) {
  RunConfig cfg;
  cfg.groups = o.groups;
  cfg.particles = o.particles;
  cfg.seed = o.seed;
  cfg.resampling = parse_resampling(o.resampling);
  cfg.ess_threshold = o.ess;
  cfg.k_inter = o.k_inter;
  cfg.k_final = o.k_final;
  cfg.max_m_steps = o.max_m_steps;
  cfg.threads = o.threads;
  for (const auto& m : o.monitors) cfg.monitors.push_back(parse_functional(m, data));
  for (const auto& f : o.functionals) cfg.functionals.push_back(parse_functional(f, data));
  cfg.validate();
  return cfg;
}

int command_run(const RunOptions& o, std::ostream& out) {
  if (o.two_pass && !o.schedule_in.empty()) {
    throw Error(ErrorKind::config, "--two-pass and --schedule are mutually exclusive");
  }
  const auto start = std::chrono::steady_clock::now();

  DatasetSpec spec;
  if (!o.registry.empty()) {
    const auto registry = o.registry_file.empty() ? builtin_registry() : load_registry(o.registry_file);
    spec = registry_spec(registry, o.registry);
  }
  spec.path = o.data;
  spec.header = spec.header || o.header;
  spec.intercept = spec.intercept || o.intercept;
  spec.supplement = spec.supplement || o.supplement;
  if (o.categories > 0) spec.categories = o.categories;

  const LogitData data = load_csv(o.data, spec);
  const double g = o.g ? *o.g : spec.modal_g.value_or(std::nan(""));
  if (!std::isfinite(g)) throw Error(ErrorKind::config, "--g is required when no registry dataset is named");

  std::vector<std::string> warnings;
  const RowMatrix prior_design = design_supplement(data.X, spec, &warnings);
  const GaussianPrior prior = build_g_prior(prior_design, data.categories, g, {});
  const RunConfig cfg = make_config(o, data);

  auto finish = [&](RunReport& report) {
    report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
  };

  std::vector<std::pair<std::string, nlohmann::json>> outputs;
  std::vector<RunReport> shown;
  if (o.two_pass) {
    auto result = run_two_pass(data, prior, cfg);
    finish(result.pass1);
    finish(result.pass2);
    if (!o.out.empty()) {
      outputs.emplace_back(with_suffix(o.out, "pass1"), report_to_json(result.pass1));
      outputs.emplace_back(with_suffix(o.out, "pass2"), report_to_json(result.pass2));
      outputs.emplace_back(o.schedule_out.empty() ? with_suffix(o.out, "schedule") : o.schedule_out,
                           schedule_to_json(result.schedule));
    } else if (!o.schedule_out.empty()) {
      outputs.emplace_back(o.schedule_out, schedule_to_json(result.schedule));
    }
    shown = {result.pass1, result.pass2};
  } else if (!o.schedule_in.empty()) {
    const CycleSchedule schedule = schedule_from_json(read_json_file(o.schedule_in));
    auto result = run_nonadaptive(data, prior, cfg, schedule);
    finish(result.report);
    if (!o.out.empty()) outputs.emplace_back(o.out, report_to_json(result.report));
    shown = {result.report};
  } else {
    auto result = run_adaptive(data, prior, cfg);
    finish(result.report);
    if (!o.out.empty()) outputs.emplace_back(o.out, report_to_json(result.report));
    if (!o.schedule_out.empty()) outputs.emplace_back(o.schedule_out, schedule_to_json(result.schedule));
    shown = {result.report};
  }

  for (const auto& [path, doc] : outputs) write_json_file(path, doc);
  if (!o.out.empty()) {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    nlohmann::json meta{{"created", utc_timestamp()},
                        {"elapsed_seconds", seconds},
                        {"threads", o.threads},
                        {"data", o.data},
                        {"dataset", o.registry},
                        {"g", g},
                        {"outputs", nlohmann::json::array()}};
    for (const auto& [path, _] : outputs) meta["outputs"].push_back(path);
    write_json_file(with_suffix(o.out, "meta"), meta);
  }
  if (!o.quiet) {
    for (std::size_t i = 0; i < shown.size(); ++i) {
      if (shown.size() > 1) out << fmt::format("== pass {} ==\n", i + 1);
      out << render_report(report_to_json(shown[i]));
    }
  }
  return 0;
}

int command_verify(const VerifyOptions& o, std::ostream& out) {
  if (o.toy != "binomial" && o.toy != "intercept") {
    throw Error(ErrorKind::config, fmt::format("unknown toy model '{}' (binomial, intercept)", o.toy));
  }
  const LogitData data = make_toy_binomial(o.observations, o.toy == "intercept", o.seed);
  const GaussianPrior prior = build_g_prior(data.X, 2, o.g);
  RunConfig cfg;
  cfg.groups = o.groups;
  cfg.particles = o.particles;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const auto functional = default_functionals(data).front();
  const auto result = run_adaptive(data, prior, cfg);
  const auto exact = quadrature_posterior(data, prior, functional);

  const auto& m = result.report.functionals.front();
  const auto& ml = result.report.log_ml;
  const bool mean_ok = std::abs(m.mean - exact.posterior_mean) <= 3.0 * m.nse;
  const bool ml_ok = std::abs(ml.log_ml - exact.log_ml) <= 3.0 * ml.nse;
  out << fmt::format("toy model: {} (T = {}, d = {}, g = {}), J = {}, N = {}, seed {}\n", o.toy, o.observations,
                     data.dim(), o.g, o.groups, o.particles, o.seed);
  out << fmt::format("{:<14}{:>12}{:>12}{:>10}{:>12}  {}\n", "quantity", "SPS", "quadrature", "NSE", "|diff|/NSE",
                     "");
  out << fmt::format("{:<14}{:>12.5f}{:>12.5f}{:>10.5f}{:>12.2f}  {}\n", m.name, m.mean, exact.posterior_mean, m.nse,
                     std::abs(m.mean - exact.posterior_mean) / m.nse, mean_ok ? "ok" : "outside 3 NSE");
  out << fmt::format("{:<14}{:>12.4f}{:>12.4f}{:>10.4f}{:>12.2f}  {}\n", "log ML", ml.log_ml, exact.log_ml, ml.nse,
                     std::abs(ml.log_ml - exact.log_ml) / ml.nse, ml_ok ? "ok" : "outside 3 NSE");
  out << ((mean_ok && ml_ok) ? "PASS\n" : "FAIL\n");
  return (mean_ok && ml_ok) ? 0 : 1;
}

int command_render(const std::string& path, std::ostream& out) {
  out << render_report(read_json_file(path));
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential posterior simulation for Bayesian multinomial logit models", "sps"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Simulate the posterior of a dataset and report moments and log ML");
  run_cmd->add_option("--data", run.data, "CSV file: outcome label, then covariates")->required();
  run_cmd->add_option("--registry", run.registry, "Registered dataset name; validates dimensions, default g");
  run_cmd->add_option("--registry-file", run.registry_file, "Registry manifest replacing the built-in one");
  run_cmd->add_flag("--header", run.header, "Skip the first line of the CSV");
  run_cmd->add_flag("--intercept", run.intercept, "Prepend a constant covariate");
  run_cmd->add_flag("--supplement", run.supplement, "Add an empty-cell row to the g-prior design");
  run_cmd->add_option("--categories", run.categories, "Outcome count C (default: registry or largest label)");
  run_cmd->add_option("--g", run.g, "g-prior scale (default: registry modal g)")->check(CLI::PositiveNumber);
  run_cmd->add_option("--J", run.groups, "Particle groups")->capture_default_str();
  run_cmd->add_option("--N", run.particles, "Particles per group")->capture_default_str();
  run_cmd->add_option("--seed", run.seed, "Random seed")->capture_default_str();
  run_cmd->add_option("--resampling", run.resampling, "residual or multinomial")->capture_default_str();
  run_cmd->add_option("--ess", run.ess, "Cycle break when ESS / JN falls below this")->capture_default_str();
  run_cmd->add_option("--k-inter", run.k_inter, "RNE target ending intermediate M phases")->capture_default_str();
  run_cmd->add_option("--k-final", run.k_final, "RNE target ending the final M phase")->capture_default_str();
  run_cmd->add_option("--max-m-steps", run.max_m_steps, "Cap on M steps per cycle")->capture_default_str();
  run_cmd->add_option("--monitor", run.monitors, "Monitor functionals: logodds:i[:j], coef:c:i, mean");
  run_cmd->add_option("--functional", run.functionals, "Reported functionals (same syntax; default log odds at xbar)");
  run_cmd->add_flag("--two-pass", run.two_pass, "Adaptive pass, then replay its schedule with fresh randomness");
  run_cmd->add_option("--schedule", run.schedule_in, "Replay a recorded schedule (nonadaptive run)");
  run_cmd->add_option("--schedule-out", run.schedule_out, "Write the recorded schedule here");
  run_cmd->add_option("--threads", run.threads, "Worker threads (speed only)")->capture_default_str();
  run_cmd->add_option("--out", run.out, "JSON report path (two-pass: .pass1/.pass2/.schedule siblings)");
  run_cmd->add_flag("--quiet", run.quiet, "Do not print the text table");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Compare SPS with quadrature on a tiny binomial logit model");
  verify_cmd->add_option("--toy", verify.toy, "binomial (slope only) or intercept (intercept and slope)")
      ->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed, "Random seed")->capture_default_str();
  verify_cmd->add_option("--J", verify.groups, "Particle groups")->capture_default_str();
  verify_cmd->add_option("--N", verify.particles, "Particles per group")->capture_default_str();
  verify_cmd->add_option("--T", verify.observations, "Observations")->capture_default_str();
  verify_cmd->add_option("--g", verify.g, "g-prior scale")->capture_default_str();
  verify_cmd->add_option("--threads", verify.threads, "Worker threads")->capture_default_str();

  std::string render_path;
  auto* render_cmd = app.add_subcommand("render", "Print a JSON report as a text table");
  render_cmd->add_option("report", render_path, "Report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code(ErrorKind::config);
  }

  try {
    if (*run_cmd) return command_run(run, out);
    if (*verify_cmd) return command_verify(verify, out);
    if (*render_cmd) return command_render(render_path, out);
  } catch (const Error& e) {
    err << fmt::format("sps: {} error: {}\n", to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << fmt::format("sps: error: {}\n", e.what());
    return 1;
  }
  return exit_code(ErrorKind::config);
}

}  // namespace sps
