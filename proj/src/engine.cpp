#include "sps/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "sps/error.hpp"

namespace sps {

const char* to_string(Resampling scheme) noexcept {
  return scheme == Resampling::residual ? "residual" : "multinomial";
}

Resampling parse_resampling(const std::string& name) {
  if (name == "residual") return Resampling::residual;
  if (name == "multinomial") return Resampling::multinomial;
  throw Error(ErrorKind::config, fmt::format("unknown resampling scheme '{}'", name));
}

std::vector<LinearFunctional> default_functionals(const LogitData& data) {
  const int k = data.covariates();
  const Vector xbar = data.covariate_mean();
  std::vector<LinearFunctional> out;
  for (int c = 1; c < data.categories; ++c) {
    Vector w = Vector::Zero(data.dim());
    w.segment((c - 1) * k, k) = xbar;
    out.push_back({fmt::format("theta{}'xbar", c), std::move(w)});
  }
  return out;
}

std::vector<LinearFunctional> default_monitors(const LogitData& data) {
  auto out = default_functionals(data);
  out.push_back({"mean(theta)", Vector::Constant(data.dim(), 1.0 / data.dim())});
  return out;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

int parse_index(const std::string& text, int lo, int hi, const std::string& expr) {
  int value = 0;
  try {
    std::size_t used = 0;
    value = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw Error(ErrorKind::config, fmt::format("functional '{}': '{}' is not an integer", expr, text));
  }
  if (value < lo || value > hi) {
    throw Error(ErrorKind::config, fmt::format("functional '{}': index {} outside {}..{}", expr, value, lo, hi));
  }
  return value;
}

}  // namespace

LinearFunctional parse_functional(const std::string& expr, const LogitData& data) {
  const int k = data.covariates();
  const int C = data.categories;
  const auto parts = split(expr, ':');
  if (parts.size() == 1 && parts[0] == "mean") {
    return {"mean(theta)", Vector::Constant(data.dim(), 1.0 / data.dim())};
  }
  if (!parts.empty() && parts[0] == "logodds" && (parts.size() == 2 || parts.size() == 3)) {
    const int i = parse_index(parts[1], 1, C, expr);
    const int j = parts.size() == 3 ? parse_index(parts[2], 1, C, expr) : C;
    if (i == j) throw Error(ErrorKind::config, fmt::format("functional '{}': categories must differ", expr));
    const Vector xbar = data.covariate_mean();
    Vector w = Vector::Zero(data.dim());
    if (i < C) w.segment((i - 1) * k, k) += xbar;
    if (j < C) w.segment((j - 1) * k, k) -= xbar;
    const std::string name = j == C ? fmt::format("theta{}'xbar", i) : fmt::format("(theta{}-theta{})'xbar", i, j);
    return {name, std::move(w)};
  }
  if (parts.size() == 3 && parts[0] == "coef") {
    const int c = parse_index(parts[1], 1, C - 1, expr);
    const int i = parse_index(parts[2], 1, k, expr);
    Vector w = Vector::Zero(data.dim());
    w((c - 1) * k + (i - 1)) = 1.0;
    return {fmt::format("theta{}[{}]", c, i), std::move(w)};
  }
  throw Error(ErrorKind::config, fmt::format("cannot parse functional '{}'", expr));
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::config, msg); };
  if (groups < 2) fail(fmt::format("need at least 2 groups, got {}", groups));
  if (particles < 2) fail(fmt::format("need at least 2 particles per group, got {}", particles));
  if (!(ess_threshold > 0.0 && ess_threshold < 1.0)) fail("ESS threshold must lie in (0, 1)");
  if (!(k_inter > 0.0 && k_inter <= k_final && k_final < 1.0)) fail("need 0 < k_inter <= k_final < 1");
  if (!(h_min > 0.0 && h_min <= h_init && h_init <= h_max)) fail("need 0 < h_min <= h_init <= h_max");
  if (!(h_step >= 0.0)) fail("h_step must be non-negative");
  if (!(accept_target > 0.0 && accept_target < 1.0)) fail("acceptance target must lie in (0, 1)");
  if (max_m_steps < 1) fail("max_m_steps must be positive");
  if (threads < 1) fail("threads must be positive");
}

RowMatrix ParticleSystem::evaluate(const LinearFunctional& g) const {
  RowMatrix out(groups, per_group);
  for (int j = 0; j < groups; ++j) {
    for (int n = 0; n < per_group; ++n) {
      out(j, n) = g(particles.col(j * per_group + n));
    }
  }
  return out;
}

int CycleSchedule::total_m_steps() const {
  int total = 0;
  for (const auto& c : cycles) total += c.steps;
  return total;
}

void CycleSchedule::validate(int T, int d) const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::config, "schedule: " + msg); };
  if (observations != T) fail(fmt::format("recorded for T = {} but data has T = {}", observations, T));
  if (dim != d) fail(fmt::format("recorded for dimension {} but model has {}", dim, d));
  if (breakpoints.size() != cycles.size() + 1 || breakpoints.front() != 0 || breakpoints.back() != T) {
    fail("breakpoints must run from 0 to T with one entry per cycle");
  }
  for (std::size_t l = 0; l < cycles.size(); ++l) {
    if (breakpoints[l + 1] <= breakpoints[l]) fail("breakpoints must be strictly increasing");
    if (cycles[l].t_end != breakpoints[l + 1]) fail(fmt::format("cycle {} end disagrees with breakpoints", l + 1));
    if (cycles[l].steps != static_cast<int>(cycles[l].proposal_cov.size())) {
      fail(fmt::format("cycle {} has {} steps but {} proposal matrices", l + 1, cycles[l].steps,
                       cycles[l].proposal_cov.size()));
    }
    for (const auto& sigma : cycles[l].proposal_cov) {
      if (sigma.rows() != d || sigma.cols() != d) fail(fmt::format("cycle {} has a misshapen proposal", l + 1));
    }
  }
}

double RunReport::min_monitor_rne() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& m : monitors) {
    if (m.rne) lo = std::min(lo, *m.rne);
  }
  return lo;
}

double ess(const Eigen::Ref<const Vector>& log_weights) {
  const double top = log_weights.maxCoeff();
  double s1 = 0.0;
  double s2 = 0.0;
  for (Eigen::Index i = 0; i < log_weights.size(); ++i) {
    const double w = std::exp(log_weights(i) - top);
    s1 += w;
    s2 += w * w;
  }
  return s1 * s1 / s2;
}

namespace {

void draw_multinomial(const std::vector<double>& weights, int draws, std::vector<int>& counts, Stream& stream) {
  if (draws <= 0) return;
  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
  const double total = cumulative.back();
  // Fallback for u * total rounding up to the total.
  std::size_t last_positive = 0;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    if (weights[n] > 0.0) last_positive = n;
  }
  for (int i = 0; i < draws; ++i) {
    const double u = stream.uniform() * total;
    auto idx = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    if (idx >= weights.size()) idx = last_positive;
    ++counts[idx];
  }
}

}  // namespace

std::vector<int> resample_counts(const Eigen::Ref<const Vector>& log_weights, Resampling scheme, Stream& stream) {
  const auto N = static_cast<std::size_t>(log_weights.size());
  const double top = log_weights.maxCoeff();
  if (!std::isfinite(top)) {
    throw Error(ErrorKind::numerical, "weight collapse: no finite weight in group");
  }
  std::vector<double> w(N);
  double sum = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    w[n] = std::exp(log_weights(static_cast<Eigen::Index>(n)) - top);
    sum += w[n];
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw Error(ErrorKind::numerical, "weight collapse: group weights sum to zero");
  }

  std::vector<int> counts(N, 0);
  if (scheme == Resampling::multinomial) {
    draw_multinomial(w, static_cast<int>(N), counts, stream);
    return counts;
  }

  std::vector<double> remainder(N);
  long assigned = 0;
  for (std::size_t n = 0; n < N; ++n) {
    const double expected = static_cast<double>(N) * (w[n] / sum);
    const double whole = std::floor(expected);
    counts[n] = static_cast<int>(whole);
    remainder[n] = expected - whole;
    assigned += counts[n];
  }
  const long left = static_cast<long>(N) - assigned;
  if (left < 0) {
    throw Error(ErrorKind::numerical, "residual resampling assigned more offspring than particles");
  }
  draw_multinomial(remainder, static_cast<int>(left), counts, stream);
  return counts;
}

double adapt_h(double h, double alpha, const RunConfig& cfg) {
  return alpha > cfg.accept_target ? std::min(h + cfg.h_step, cfg.h_max) : std::max(h - cfg.h_step, cfg.h_min);
}

ParticleSystem init_particles(const GaussianPrior& prior, const RunConfig& cfg, std::vector<std::uint64_t> group_ids,
                              std::uint64_t seed, const Executor& exec) {
  if (group_ids.empty()) {
    group_ids.resize(static_cast<std::size_t>(cfg.groups));
    std::iota(group_ids.begin(), group_ids.end(), std::uint64_t{0});
  }
  ParticleSystem ps;
  ps.groups = static_cast<int>(group_ids.size());
  ps.per_group = cfg.particles;
  ps.group_ids = std::move(group_ids);
  ps.seed = seed;
  ps.h = cfg.h_init;
  ps.particles.resize(prior.dim(), ps.size());
  ps.log_weights = Vector::Zero(ps.size());
  ps.log_kernel = Vector::Zero(ps.size());
  const int N = ps.per_group;
  exec.for_each(static_cast<std::size_t>(ps.size()), [&](std::size_t i) {
    const auto j = i / static_cast<std::size_t>(N);
    const auto n = i % static_cast<std::size_t>(N);
    Stream stream(stream_key(seed, StreamPhase::init, 0, 0, ps.group_ids[j], n));
    ps.particles.col(static_cast<Eigen::Index>(i)) = sample_prior(prior, stream);
  });
  return ps;
}

namespace {

double predictive_at(const ParticleSystem& ps, const LogitData& data, std::size_t i, int t) {
  try {
    return log_predictive(ps.particles.col(static_cast<Eigen::Index>(i)), data, t);
  } catch (const Error& e) {
    const auto N = static_cast<std::size_t>(ps.per_group);
    throw Error(e.kind(), fmt::format("{} (group {}, particle {})", e.what(), i / N + 1, i % N + 1));
  }
}

double log_kernel_at(const Eigen::Ref<const Vector>& theta, const LogitData& data, const GaussianPrior& prior,
                     int upto) {
  return prior_log_density(prior, theta) + log_likelihood_range(theta, data, 0, upto);
}

}  // namespace

int c_phase(ParticleSystem& ps, const LogitData& data, const RunConfig& cfg, const Executor& exec) {
  const int T = data.observations();
  if (ps.absorbed >= T) {
    throw Error(ErrorKind::config, "C phase called with every observation already absorbed");
  }
  ps.log_weights.setZero();
  const double total = static_cast<double>(ps.size());
  for (int s = ps.absorbed; s < T; ++s) {
    exec.for_each(static_cast<std::size_t>(ps.size()), [&](std::size_t i) {
      ps.log_weights(static_cast<Eigen::Index>(i)) += predictive_at(ps, data, i, s);
    });
    ps.absorbed = s + 1;
    if (ess(ps.log_weights) / total < cfg.ess_threshold) break;
  }
  return ps.absorbed;
}

void c_phase_to(ParticleSystem& ps, const LogitData& data, int t_end, const Executor& exec) {
  if (t_end <= ps.absorbed || t_end > data.observations()) {
    throw Error(ErrorKind::config,
                fmt::format("C phase cannot move from observation {} to {} (T = {})", ps.absorbed, t_end,
                            data.observations()));
  }
  const int first = ps.absorbed;
  exec.for_each(static_cast<std::size_t>(ps.size()), [&](std::size_t i) {
    double acc = 0.0;
    for (int s = first; s < t_end; ++s) {
      acc += predictive_at(ps, data, i, s);
    }
    ps.log_weights(static_cast<Eigen::Index>(i)) = acc;
  });
  ps.absorbed = t_end;
}

void s_phase(ParticleSystem& ps, Resampling scheme, int cycle, const Executor& exec) {
  const int N = ps.per_group;
  exec.for_each(static_cast<std::size_t>(ps.groups), [&](std::size_t j) {
    Stream stream(stream_key(ps.seed, StreamPhase::selection, static_cast<std::uint64_t>(cycle), 0, ps.group_ids[j], 0));
    const auto offset = static_cast<Eigen::Index>(j) * N;
    std::vector<int> counts;
    try {
      counts = resample_counts(ps.log_weights.segment(offset, N), scheme, stream);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{} (cycle {}, group {}, after observation {})", e.what(), cycle, j + 1,
                                        ps.absorbed));
    }
    const Matrix old = ps.particles.middleCols(offset, N);
    Eigen::Index out = offset;
    for (int n = 0; n < N; ++n) {
      for (int c = 0; c < counts[static_cast<std::size_t>(n)]; ++c) {
        ps.particles.col(out++) = old.col(n);
      }
    }
  });
  ps.log_weights.setZero();
  ps.kernel_upto = -1;
}

Matrix pooled_covariance(const ParticleSystem& ps) {
  const Vector mean = ps.particles.rowwise().mean();
  const Matrix centered = ps.particles.colwise() - mean;
  return centered * centered.transpose() / static_cast<double>(ps.size() - 1);
}

Matrix factor_proposal(Matrix& sigma) {
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  const auto d = sigma.rows();
  const double ridge = 1e-8 * sigma.trace() / static_cast<double>(d);
  if (ridge > 0.0 && std::isfinite(ridge)) {
    sigma.diagonal().array() += ridge;
    llt.compute(sigma);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const auto rank = (ev.array() > 1e-12 * std::max(ev.maxCoeff(), 0.0)).count();
  throw Error(ErrorKind::numerical,
              fmt::format("pooled particle variance is singular (numerical rank {} of {}): particles are depleted, "
                          "typically because the prior is too diffuse for the first observations",
                          rank, d));
}

double m_step(ParticleSystem& ps, const LogitData& data, const GaussianPrior& prior, int upto,
              const Eigen::Ref<const Matrix>& proposal_chol, int cycle, int step, const Executor& exec) {
  const auto count = static_cast<std::size_t>(ps.size());
  const auto N = static_cast<std::size_t>(ps.per_group);
  const auto d = ps.dim();
  if (ps.kernel_upto != upto) {
    ps.log_kernel.resize(ps.size());
    exec.for_each(count, [&](std::size_t i) {
      const auto col = static_cast<Eigen::Index>(i);
      ps.log_kernel(col) = log_kernel_at(ps.particles.col(col), data, prior, upto);
    });
    ps.kernel_upto = upto;
  }

  std::vector<char> accepted(count, 0);
  exec.for_each(count, [&](std::size_t i) {
    Stream stream(stream_key(ps.seed, StreamPhase::mutation, static_cast<std::uint64_t>(cycle),
                             static_cast<std::uint64_t>(step), ps.group_ids[i / N], i % N));
    const auto col = static_cast<Eigen::Index>(i);
    Vector z(d);
    for (int c = 0; c < d; ++c) z(c) = stream.normal();
    Vector proposal = ps.particles.col(col);
    for (int r = 0; r < d; ++r) {
      double shift = 0.0;
      for (int c = 0; c <= r; ++c) shift += proposal_chol(r, c) * z(c);
      proposal(r) += shift;
    }
    double candidate = 0.0;
    try {
      candidate = log_kernel_at(proposal, data, prior, upto);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{} (M step {} of cycle {}, group {}, particle {})", e.what(), step, cycle,
                                        i / N + 1, i % N + 1));
    }
    const double u = stream.uniform();
    const double diff = candidate - ps.log_kernel(col);
    if (diff >= 0.0 || u < std::exp(diff)) {
      ps.particles.col(col) = proposal;
      ps.log_kernel(col) = candidate;
      accepted[i] = 1;
    }
  });
  const auto hits = std::count(accepted.begin(), accepted.end(), char{1});
  return static_cast<double>(hits) / static_cast<double>(count);
}

double min_rne(const ParticleSystem& ps, const std::vector<LinearFunctional>& monitors) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& g : monitors) {
    const RowMatrix values = ps.evaluate(g);
    const auto means = group_means(values);
    const auto est = nse(means, ps.per_group);
    if (const auto r = rne(values, est.vhat)) lo = std::min(lo, *r);
  }
  return lo;
}

int m_phase(ParticleSystem& ps, const LogitData& data, const GaussianPrior& prior, const RunConfig& cfg,
            const std::vector<LinearFunctional>& monitors, int cycle, CycleRecord& record, const Executor& exec) {
  const int upto = ps.absorbed;
  const double target = upto == data.observations() ? cfg.k_final : cfg.k_inter;
  for (int r = 1;; ++r) {
    Matrix sigma = ps.h * pooled_covariance(ps);
    Matrix chol;
    try {
      chol = factor_proposal(sigma);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{} (cycle {}, M step {}, after observation {})", e.what(), cycle, r, upto));
    }
    const double alpha = m_step(ps, data, prior, upto, chol, cycle, r, exec);
    record.proposal_cov.push_back(std::move(sigma));
    record.h.push_back(ps.h);
    record.acceptance.push_back(alpha);
    ps.h = adapt_h(ps.h, alpha, cfg);
    const double achieved = min_rne(ps, monitors);
    record.min_rne.push_back(achieved);
    if (achieved >= target) {
      record.steps = r;
      return r;
    }
    if (r >= cfg.max_m_steps) {
      std::string trace;
      const auto& hist = record.min_rne;
      for (auto it = hist.size() > 10 ? hist.end() - 10 : hist.begin(); it != hist.end(); ++it) {
        trace += fmt::format(" {:.3f}", *it);
      }
      throw Error(ErrorKind::mixing, fmt::format("M phase of cycle {} did not reach RNE {} within {} steps; last "
                                                 "RNEs:{}",
                                                 cycle, target, cfg.max_m_steps, trace));
    }
  }
}

void run_cycle(ParticleSystem& ps, const LogitData& data, const GaussianPrior& prior, const RunConfig& cfg,
               const CycleRecord& fragment, int cycle, MLReport* ml, const Executor& exec) {
  c_phase_to(ps, data, fragment.t_end, exec);
  if (ml) accumulate_log_ml(ps.weight_array(), fragment.t_end, *ml);
  s_phase(ps, cfg.resampling, cycle, exec);
  for (int r = 1; r <= fragment.steps; ++r) {
    Matrix sigma = fragment.proposal_cov[static_cast<std::size_t>(r - 1)];
    const Matrix chol = factor_proposal(sigma);
    m_step(ps, data, prior, fragment.t_end, chol, cycle, r, exec);
  }
}

namespace {

void check_inputs(const LogitData& data, const GaussianPrior& prior, const RunConfig& cfg) {
  cfg.validate();
  if (prior.dim() != data.dim()) {
    throw Error(ErrorKind::config,
                fmt::format("prior dimension {} does not match model dimension {}", prior.dim(), data.dim()));
  }
  for (const auto* list : {&cfg.monitors, &cfg.functionals}) {
    for (const auto& g : *list) {
      if (g.weights.size() != data.dim()) {
        throw Error(ErrorKind::config, fmt::format("functional '{}' has length {}, model dimension is {}", g.name,
                                                   g.weights.size(), data.dim()));
      }
    }
  }
}

RunReport make_report(std::string algorithm, const ParticleSystem& ps, const RunConfig& cfg,
                      const std::vector<LinearFunctional>& functionals, const std::vector<LinearFunctional>& monitors,
                      MLReport ml, const CycleSchedule& schedule, double final_h) {
  RunReport report;
  report.algorithm = std::move(algorithm);
  report.groups = ps.groups;
  report.particles = ps.per_group;
  report.seed = ps.seed;
  report.resampling = to_string(cfg.resampling);
  for (const auto& g : functionals) report.functionals.push_back(summarize_moment(g.name, ps.evaluate(g)));
  for (const auto& g : monitors) report.monitors.push_back(summarize_moment(g.name, ps.evaluate(g)));
  report.log_ml = std::move(ml);
  report.schedule.cycles = static_cast<int>(schedule.cycles.size());
  report.schedule.breakpoints = schedule.breakpoints;
  for (const auto& c : schedule.cycles) report.schedule.steps.push_back(c.steps);
  report.schedule.total_m_steps = schedule.total_m_steps();
  report.schedule.final_h = final_h;
  const int d = ps.dim();
  if (ps.size() < 2 * d) {
    report.warnings.push_back(
        fmt::format("J*N = {} is below twice the parameter dimension ({}); proposal variances may be poor", ps.size(),
                    2 * d));
  }
  return report;
}

}  // namespace

AdaptiveResult run_adaptive(const LogitData& data, const GaussianPrior& prior, const RunConfig& cfg) {
  check_inputs(data, prior, cfg);
  const Executor exec(cfg.threads);
  const auto functionals = cfg.functionals.empty() ? default_functionals(data) : cfg.functionals;
  const auto monitors = cfg.monitors.empty() ? default_monitors(data) : cfg.monitors;
  const int T = data.observations();

  AdaptiveResult result;
  result.particles = init_particles(prior, cfg, {}, cfg.seed, exec);
  ParticleSystem& ps = result.particles;
  CycleSchedule& schedule = result.schedule;
  schedule.observations = T;
  schedule.dim = data.dim();
  schedule.breakpoints = {0};
  MLReport ml;

  for (int cycle = 1;; ++cycle) {
    CycleRecord record;
    record.t_end = c_phase(ps, data, cfg, exec);
    record.ess = ess(ps.log_weights);
    accumulate_log_ml(ps.weight_array(), record.t_end, ml);
    s_phase(ps, cfg.resampling, cycle, exec);
    m_phase(ps, data, prior, cfg, monitors, cycle, record, exec);
    schedule.breakpoints.push_back(record.t_end);
    schedule.cycles.push_back(std::move(record));
    if (ps.absorbed == T) break;
  }
  result.report = make_report("adaptive", ps, cfg, functionals, monitors, std::move(ml), schedule, ps.h);
  return result;
}

NonadaptiveResult run_nonadaptive(const LogitData& data, const GaussianPrior& prior, const RunConfig& cfg,
                                  const CycleSchedule& schedule) {
  check_inputs(data, prior, cfg);
  schedule.validate(data.observations(), data.dim());
  const Executor exec(cfg.threads);
  const auto functionals = cfg.functionals.empty() ? default_functionals(data) : cfg.functionals;
  const auto monitors = cfg.monitors.empty() ? default_monitors(data) : cfg.monitors;

  NonadaptiveResult result;
  result.particles = init_particles(prior, cfg, {}, cfg.seed, exec);
  MLReport ml;
  for (std::size_t l = 0; l < schedule.cycles.size(); ++l) {
    run_cycle(result.particles, data, prior, cfg, schedule.cycles[l], static_cast<int>(l + 1), &ml, exec);
  }
  double final_h = cfg.h_init;
  for (const auto& c : schedule.cycles) {
    if (!c.h.empty() && c.acceptance.size() == c.h.size()) final_h = adapt_h(c.h.back(), c.acceptance.back(), cfg);
  }
  result.report =
      make_report("nonadaptive", result.particles, cfg, functionals, monitors, std::move(ml), schedule, final_h);
  return result;
}

std::uint64_t second_pass_seed(std::uint64_t seed) noexcept { return stream_key(seed, StreamPhase::pass, 2, 0, 0, 0); }

TwoPassResult run_two_pass(const LogitData& data, const GaussianPrior& prior, const RunConfig& cfg) {
  auto first = run_adaptive(data, prior, cfg);
  RunConfig replay = cfg;
  replay.seed = second_pass_seed(cfg.seed);
  auto second = run_nonadaptive(data, prior, replay, first.schedule);
  return TwoPassResult{std::move(first.report), std::move(second.report), std::move(first.schedule)};
}

}  // namespace sps
