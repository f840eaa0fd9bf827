// Acceptance checks. Prints one line per criterion and exits nonzero if any
// criterion fails. Dataset-dependent checks are skipped when the data files
// are not present (set SPS_DATA_DIR to a directory holding cars.csv and
// caesarean1.csv laid out as the registry expects).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>

#include <fmt/format.h>

#include "sps/data_io.hpp"
#include "sps/engine.hpp"
#include "sps/oracle_ref.hpp"
#include "sps/report_io.hpp"

using namespace sps;

namespace {

int failures = 0;
double worst_final_rne = std::numeric_limits<double>::infinity();
int completed_runs = 0;

void line(const std::string& id, const std::string& status, const std::string& detail) {
  if (status == "FAIL") ++failures;
  fmt::print("[{}] criterion {:<3} {}\n", status, id, detail);
  std::fflush(stdout);
}

void note_rne(const RunReport& report) {
  worst_final_rne = std::min(worst_final_rne, report.min_monitor_rne());
  ++completed_runs;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

RunConfig config(std::uint64_t seed, int J = 10, int N = 1000) {
  RunConfig cfg;
  cfg.groups = J;
  cfg.particles = N;
  cfg.seed = seed;
  return cfg;
}

LogitData fixture() {
  DatasetSpec spec;
  spec.categories = 3;
  return load_csv(std::string(SPS_FIXTURE_DIR) + "/synthetic_mnl.csv", spec);
}

// Criteria 1 and 2: toy binomial models against quadrature, 20 seeds per variant.
void oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  std::string moments, logml;
  bool moments_ok = true, logml_ok = true;
  for (bool intercept : {false, true}) {
    int mean_hits = 0, ml_hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const LogitData data = make_toy_binomial(30, intercept, seed);
      const GaussianPrior prior = build_g_prior(data.X, 2, 1.0);
      const auto g = default_functionals(data).front();
      const auto run = run_adaptive(data, prior, config(seed));
      note_rne(run.report);
      const auto exact = quadrature_posterior(data, prior, g);
      const auto& m = run.report.functionals.front();
      mean_hits += std::abs(m.mean - exact.posterior_mean) <= 3.0 * m.nse;
      ml_hits += std::abs(run.report.log_ml.log_ml - exact.log_ml) <= 3.0 * run.report.log_ml.nse;
    }
    const char* name = intercept ? "intercept+slope" : "slope only";
    moments += fmt::format("{} {}/20; ", name, mean_hits);
    logml += fmt::format("{} {}/20; ", name, ml_hits);
    moments_ok = moments_ok && mean_hits >= 18;
    logml_ok = logml_ok && ml_hits >= 18;
  }
  const double elapsed = seconds_since(start);
  line("1", moments_ok && elapsed < 60.0 ? "PASS" : "FAIL",
       fmt::format("posterior mean within 3 NSE of quadrature: {}need >= 18/20 each; {:.1f} s (limit 60 s)", moments,
                   elapsed));
  line("2", logml_ok ? "PASS" : "FAIL",
       fmt::format("log ML within 3 NSE of quadrature: {}need >= 18/20 each", logml));
}

// Criterion 3: spread of grand means across independent runs against the reported NSE.
void nse_calibration() {
  const auto start = std::chrono::steady_clock::now();
  const LogitData data = make_toy_binomial(30, true, 101);
  const GaussianPrior prior = build_g_prior(data.X, 2, 1.0);
  std::vector<double> means, nses;
  for (std::uint64_t seed = 1; seed <= 16; ++seed) {
    const auto run = run_two_pass(data, prior, config(1000 + seed));
    note_rne(run.pass1);
    means.push_back(run.pass2.functionals.front().mean);
    nses.push_back(run.pass2.functionals.front().nse);
  }
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / 16.0;
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  const double sd = std::sqrt(ss / 15.0);
  const double avg_nse = std::accumulate(nses.begin(), nses.end(), 0.0) / 16.0;
  const double ratio = sd / avg_nse;
  const double elapsed = seconds_since(start);
  line("3", ratio >= 0.6 && ratio <= 1.7 && elapsed < 120.0 ? "PASS" : "FAIL",
       fmt::format("sd of 16 grand means / mean NSE = {:.4g} / {:.4g} = {:.3f}, need [0.6, 1.7]; {:.1f} s (limit 120 s)",
                   sd, avg_nse, ratio, elapsed));
}

// Criterion 4: one-pass and two-pass estimates agree.
void two_pass_consistency() {
  const LogitData data = fixture();
  const GaussianPrior prior = build_g_prior(data.X, 3, 0.25);
  int agree = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto run = run_two_pass(data, prior, config(200 + seed));
    note_rne(run.pass1);
    for (std::size_t f = 0; f < run.pass1.functionals.size(); ++f) {
      const auto& a = run.pass1.functionals[f];
      const auto& b = run.pass2.functionals[f];
      agree += std::abs(a.mean - b.mean) <= 3.0 * std::hypot(a.nse, b.nse);
      ++total;
    }
    const auto& a = run.pass1.log_ml;
    const auto& b = run.pass2.log_ml;
    agree += std::abs(a.log_ml - b.log_ml) <= 3.0 * std::hypot(a.nse, b.nse);
    ++total;
  }
  line("4", agree >= 0.95 * total ? "PASS" : "FAIL",
       fmt::format("pass 1 vs pass 2 within 3 combined NSE: {}/{} quantities over 10 seeds (need >= 95%)", agree,
                   total));
}

// Criterion 6: the prior variance of a log-odds, averaged over the rows of X.
double mean_logodds_variance(const RowMatrix& X, double g, int draws, std::uint64_t seed) {
  const GaussianPrior prior = build_g_prior(X, 3, g);
  const auto T = X.rows();
  const auto k = X.cols();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(T), sumsq = Eigen::VectorXd::Zero(T);
  Stream stream(seed);
  for (int i = 0; i < draws; ++i) {
    const Vector theta = sample_prior(prior, stream);
    const Vector diff = theta.head(k) - theta.tail(k);  // categories 1 and 2
    const Eigen::VectorXd lo = X * diff;
    sum += lo;
    sumsq += lo.cwiseProduct(lo);
  }
  const Eigen::VectorXd var = sumsq / draws - (sum / draws).cwiseProduct(sum / draws);
  return var.mean();
}

void g_prior_scale() {
  const double g = 0.25;
  const int draws = 200000;
  RowMatrix x1(40, 1);
  Stream s(6);
  for (int t = 0; t < 40; ++t) x1(t, 0) = 1.0 + s.normal();
  const double v1 = mean_logodds_variance(x1, g, draws, 61);
  line("6", std::abs(v1 / (2 * g) - 1.0) < 0.02 ? "PASS" : "FAIL",
       fmt::format("single-covariate design: mean-over-t log-odds variance {:.5f} vs 2g = {:.5f} (ratio {:.4f}, "
                   "need within 2%)",
                   v1, 2 * g, v1 / (2 * g)));

  RowMatrix x3(40, 3);
  for (int t = 0; t < 40; ++t) {
    x3(t, 0) = 1.0;
    x3(t, 1) = s.normal();
    x3(t, 2) = s.normal();
  }
  const double v3 = mean_logodds_variance(x3, g, draws, 62);
  line("6", std::abs(v3 / (6 * g) - 1.0) < 0.02 ? "PASS" : "FAIL",
       fmt::format("three-covariate design: variance {:.5f} vs 2gk = {:.5f} (ratio {:.4f}); the 2g statement holds "
                   "only for k = 1 (2g = {:.3f} would give ratio {:.3f})",
                   v3, 6 * g, v3 / (6 * g), 2 * g, v3 / (2 * g)));
}

// Criterion 7: published numbers, when the datasets are available.
void published_numbers() {
  const char* env = std::getenv("SPS_DATA_DIR");
  const std::filesystem::path dir = env ? env : SPS_FIXTURE_DIR;
  const auto cars_path = dir / "cars.csv";
  const auto caes_path = dir / "caesarean1.csv";
  if (!std::filesystem::exists(cars_path) || !std::filesystem::exists(caes_path)) {
    line("7", "SKIP",
         fmt::format("dataset files not found ({} and {}); set SPS_DATA_DIR to run", cars_path.string(),
                     caes_path.string()));
    return;
  }
  const auto& reg = builtin_registry();
  auto load = [&](const std::string& name, const std::filesystem::path& path) {
    DatasetSpec spec = registry_spec(reg, name);
    return load_csv(path.string(), spec);
  };
  const LogitData cars = load("Cars", cars_path);
  const GaussianPrior cars_prior = build_g_prior(cars.X, cars.categories, 0.25);
  const auto big = run_adaptive(cars, cars_prior, config(1, 40, 2500)).report;
  note_rne(big);
  const auto& f1 = big.functionals[0];
  const auto& f2 = big.functionals[1];
  const bool m1 = std::abs(f1.mean - 0.685) <= 3.0 * f1.nse;
  const bool m2 = std::abs(f2.mean + 0.388) <= 3.0 * f2.nse;
  const bool ml = std::abs(big.log_ml.log_ml + 253.62) <= 3.0 * 0.03;
  const auto small = run_adaptive(cars, cars_prior, config(1)).report;
  note_rne(small);
  const bool cycles = std::abs(small.schedule.cycles - 24) <= 0.3 * 24;

  const LogitData caes = load("Caesarean 1", caes_path);
  const auto caes_run = run_adaptive(caes, build_g_prior(caes.X, caes.categories, 1.0), config(1, 40, 2500)).report;
  note_rne(caes_run);
  const bool caes_ml = std::abs(caes_run.log_ml.log_ml + 177.29) <= 0.09;
  line("7", m1 && m2 && ml && cycles && caes_ml ? "PASS" : "FAIL",
       fmt::format("Cars E1 {:.4f} ({:.4f}) vs 0.685, E2 {:.4f} ({:.4f}) vs -0.388, log ML {:.3f} vs -253.62, "
                   "cycles {} vs 24; Caesarean 1 log ML {:.3f} vs -177.29",
                   f1.mean, f1.nse, f2.mean, f2.nse, big.log_ml.log_ml, small.schedule.cycles,
                   caes_run.log_ml.log_ml));
}

// Criterion 8: byte-identical reports under 1 and 8 workers.
void determinism() {
  const LogitData data = fixture();
  const GaussianPrior prior = build_g_prior(data.X, 3, 0.25);
  RunConfig cfg = config(77);
  const auto a = run_adaptive(data, prior, cfg).report;
  note_rne(a);
  cfg.threads = 8;
  const auto b = run_adaptive(data, prior, cfg).report;
  const std::string ja = report_to_json(a).dump(2);
  const std::string jb = report_to_json(b).dump(2);
  line("8", ja == jb ? "PASS" : "FAIL",
       fmt::format("report JSON with 1 and 8 workers: {} ({} bytes)", ja == jb ? "identical" : "different", ja.size()));
}

// Criterion 9: engine phases against the scalar reference, two chained cycles.
void scalar_equivalence() {
  int matched = 0;
  std::string first_mismatch;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RowMatrix X(5, 2);
    std::vector<int> y(5);
    for (int t = 0; t < 5; ++t) {
      Stream s(stream_key(seed, StreamPhase::synthetic, 9, 0, 0, static_cast<std::uint64_t>(t)));
      X(t, 0) = 1.0;
      X(t, 1) = s.normal();
      y[static_cast<std::size_t>(t)] = 1 + static_cast<int>(s.uniform() * 3);
    }
    const LogitData data = make_logit_data(y, X, 3);
    const GaussianPrior prior = build_g_prior(X, 3, 1.0);
    RunConfig cfg = config(seed, 2, 5);
    cfg.resampling = seed % 2 ? Resampling::multinomial : Resampling::residual;
    const Executor exec(1);
    ParticleSystem engine = init_particles(prior, cfg, {}, seed, exec);
    ParticleSystem ref = engine;
    std::string where;
    int cycle = 1;
    for (int t_end : {3, 5}) {
      CycleRecord fragment;
      fragment.t_end = t_end;
      fragment.steps = 4;
      fragment.proposal_cov.assign(4, 0.5 * pooled_covariance(engine) + 1e-6 * Matrix::Identity(4, 4));
      Vector ref_weights;
      ref = scalar_cycle_reference(ref, data, prior, cfg, fragment, cycle, &ref_weights);
      c_phase_to(engine, data, t_end, exec);
      if (where.empty() && engine.log_weights != ref_weights) where = fmt::format("C phase, cycle {}", cycle);
      s_phase(engine, cfg.resampling, cycle, exec);
      for (int r = 1; r <= fragment.steps; ++r) {
        Matrix sigma = fragment.proposal_cov[static_cast<std::size_t>(r - 1)];
        m_step(engine, data, prior, t_end, factor_proposal(sigma), cycle, r, exec);
      }
      if (where.empty() && engine.particles != ref.particles) where = fmt::format("S/M phase, cycle {}", cycle);
      ++cycle;
    }
    if (where.empty()) {
      ++matched;
    } else if (first_mismatch.empty()) {
      first_mismatch = fmt::format("; first mismatch: seed {} in {}", seed, where);
    }
  }
  line("9", matched == 50 ? "PASS" : "FAIL",
       fmt::format("engine vs scalar reference, J=2 N=5 T=5, two cycles: {}/50 seeds bitwise identical{}", matched,
                   first_mismatch));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  oracle_equivalence();
  nse_calibration();
  two_pass_consistency();
  g_prior_scale();
  published_numbers();
  determinism();
  scalar_equivalence();
  // Criterion 5 collects the final monitor RNE of every adaptive run above.
  line("5", worst_final_rne >= 0.9 ? "PASS" : "FAIL",
       fmt::format("smallest final monitor RNE over {} completed adaptive runs: {:.3f} (need >= 0.9)",
                   completed_runs, worst_final_rne));
  fmt::print("total {:.1f} s, {} failing line(s)\n", seconds_since(start), failures);
  return failures == 0 ? 0 : 1;
}
