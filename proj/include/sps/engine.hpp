#ifndef SPS_ENGINE_HPP
#define SPS_ENGINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sps/diagnostics.hpp"
#include "sps/model_logit.hpp"
#include "sps/parallel.hpp"

/**
 * \file
 * \brief Sequential posterior simulator.
 *
 * Observations are absorbed in cycles. Each cycle reweights particles by the
 * predictive likelihood of new observations (C phase), resamples within each
 * group (S phase) and rejuvenates the particles with Gaussian random-walk
 * Metropolis steps targeting the current posterior (M phase).
 *
 * The adaptive driver chooses cycle breakpoints from the effective sample size
 * and proposal variances from the particles themselves, and records both in a
 * CycleSchedule. The nonadaptive driver replays a schedule with fresh
 * randomness, which is what the two-pass mode does.
 */

namespace sps {

enum class Resampling { residual, multinomial };

const char* to_string(Resampling scheme) noexcept;
Resampling parse_resampling(const std::string& name);

/// g(theta) = weights' theta.
struct LinearFunctional {
  std::string name;
  Vector weights;

  double operator()(const Eigen::Ref<const Vector>& theta) const { return weights.dot(theta); }
};

/// theta_c' xbar for c = 1..C-1: the log odds of each category against the
/// reference at the covariate means.
std::vector<LinearFunctional> default_functionals(const LogitData& data);

/// default_functionals plus the mean of all coordinates.
std::vector<LinearFunctional> default_monitors(const LogitData& data);

/// Parses "logodds:i" (theta_i' xbar), "logodds:i:j" ((theta_i - theta_j)' xbar),
/// "coef:c:i" (coefficient i of category c, 1-based) and "mean".
LinearFunctional parse_functional(const std::string& expr, const LogitData& data);

struct RunConfig {
  int groups = 10;
  int particles = 1000;  ///< per group
  std::uint64_t seed = 0;
  double ess_threshold = 0.5;
  double k_inter = 0.35;
  double k_final = 0.9;
  double h_init = 0.5;
  double h_step = 0.01;
  double h_min = 0.1;
  double h_max = 1.0;
  double accept_target = 0.25;
  Resampling resampling = Resampling::residual;
  std::vector<LinearFunctional> monitors;     ///< empty: default_monitors
  std::vector<LinearFunctional> functionals;  ///< reported moments; empty: default_functionals
  int max_m_steps = 1000;
  int threads = 1;

  /// Throws Error(config) when an invariant is violated.
  void validate() const;
};

/// J groups of N particles stored column-wise; particle n of group j is column
/// j * N + n. Log-weights use the same index.
struct ParticleSystem {
  int groups = 0;
  int per_group = 0;
  Matrix particles;
  Vector log_weights;
  int absorbed = 0;  ///< observations absorbed so far
  double h = 0.5;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> group_ids;  ///< stream identity of each group

  /// Cached log prior + log likelihood over [0, kernel_upto); valid only when
  /// kernel_upto matches the M phase target.
  Vector log_kernel;
  int kernel_upto = -1;

  int size() const noexcept { return groups * per_group; }
  int dim() const noexcept { return static_cast<int>(particles.rows()); }

  /// Per-particle values of g as a J x N array.
  RowMatrix evaluate(const LinearFunctional& g) const;
  Eigen::Map<const RowMatrix> weight_array() const { return {log_weights.data(), groups, per_group}; }
};

struct CycleRecord {
  int t_end = 0;
  int steps = 0;
  std::vector<Matrix> proposal_cov;  ///< one per M step, as used
  std::vector<double> h;             ///< diagnostic
  std::vector<double> acceptance;    ///< diagnostic
  std::vector<double> min_rne;       ///< diagnostic; +inf when undefined
  double ess = 0.0;                  ///< pooled ESS at the breakpoint
};

struct CycleSchedule {
  int observations = 0;
  int dim = 0;
  std::vector<int> breakpoints;  ///< 0 = t_0 < t_1 < ... < t_L = T
  std::vector<CycleRecord> cycles;

  int total_m_steps() const;
  /// Throws Error(config) if the schedule does not fit the data dimensions.
  void validate(int observations, int dim) const;
};

struct ScheduleSummary {
  int cycles = 0;
  std::vector<int> breakpoints;
  std::vector<int> steps;
  int total_m_steps = 0;
  double final_h = 0.0;
};

struct RunReport {
  std::string algorithm;  ///< "adaptive" or "nonadaptive"
  int groups = 0;
  int particles = 0;
  std::uint64_t seed = 0;
  std::string resampling;
  std::vector<MomentSummary> functionals;
  std::vector<MomentSummary> monitors;
  MLReport log_ml;
  ScheduleSummary schedule;
  std::vector<std::string> warnings;

  /// Smallest defined monitor RNE, +inf if none is defined.
  double min_monitor_rne() const;
};

struct AdaptiveResult {
  ParticleSystem particles;
  CycleSchedule schedule;
  RunReport report;
};

struct NonadaptiveResult {
  ParticleSystem particles;
  RunReport report;
};

struct TwoPassResult {
  RunReport pass1;
  RunReport pass2;
  CycleSchedule schedule;
};

// Phases.

/// (sum w)^2 / sum w^2 after max subtraction.
double ess(const Eigen::Ref<const Vector>& log_weights);

/// Per-group offspring counts. Residual: floor(N w) copies then multinomial on
/// the remainders. Throws Error(numerical) on weight collapse.
std::vector<int> resample_counts(const Eigen::Ref<const Vector>& log_weights, Resampling scheme, Stream& stream);

double adapt_h(double h, double alpha, const RunConfig& cfg);

/// Draws initial particles from the prior. `group_ids` gives the stream
/// identity of each group; the defaults are 0..J-1.
ParticleSystem init_particles(const GaussianPrior& prior, const RunConfig& cfg, std::vector<std::uint64_t> group_ids,
                              std::uint64_t seed, const Executor& exec);

/// Adaptive C phase: absorbs observations until pooled ESS / (J N) falls below
/// the threshold or the data run out. Returns the new breakpoint.
int c_phase(ParticleSystem& ps, const LogitData& data, const RunConfig& cfg, const Executor& exec);

/// Nonadaptive C phase ending exactly at t_end.
void c_phase_to(ParticleSystem& ps, const LogitData& data, int t_end, const Executor& exec);

void s_phase(ParticleSystem& ps, Resampling scheme, int cycle, const Executor& exec);

/// Pooled sample covariance of all J N particles.
Matrix pooled_covariance(const ParticleSystem& ps);

/// Cholesky factor of a proposal covariance, retrying once with a ridge of
/// 1e-8 * trace / d. Throws Error(numerical) if both fail.
Matrix factor_proposal(Matrix& sigma);

/// One random-walk Metropolis step for every particle, targeting prior times
/// likelihood of observations [0, upto). Returns the pooled acceptance rate.
double m_step(ParticleSystem& ps, const LogitData& data, const GaussianPrior& prior, int upto,
              const Eigen::Ref<const Matrix>& proposal_chol, int cycle, int step, const Executor& exec);

/// Smallest RNE over the monitors; +inf when no RNE is defined.
double min_rne(const ParticleSystem& ps, const std::vector<LinearFunctional>& monitors);

/// Adaptive M phase. Appends every step's proposal to `record` and returns R.
int m_phase(ParticleSystem& ps, const LogitData& data, const GaussianPrior& prior, const RunConfig& cfg,
            const std::vector<LinearFunctional>& monitors, int cycle, CycleRecord& record, const Executor& exec);

/// One nonadaptive cycle following `fragment`: C phase to fragment.t_end, S
/// phase, then fragment.steps M steps with the recorded proposals. If `ml` is
/// given the C phase weights are folded into it.
void run_cycle(ParticleSystem& ps, const LogitData& data, const GaussianPrior& prior, const RunConfig& cfg,
               const CycleRecord& fragment, int cycle, MLReport* ml, const Executor& exec);

// Drivers.

AdaptiveResult run_adaptive(const LogitData& data, const GaussianPrior& prior, const RunConfig& cfg);

NonadaptiveResult run_nonadaptive(const LogitData& data, const GaussianPrior& prior, const RunConfig& cfg,
                                  const CycleSchedule& schedule);

/// Adaptive pass, then a replay of its schedule with a seed derived from
/// cfg.seed. Pass-1 particles are discarded.
TwoPassResult run_two_pass(const LogitData& data, const GaussianPrior& prior, const RunConfig& cfg);

std::uint64_t second_pass_seed(std::uint64_t seed) noexcept;

}  // namespace sps

#endif
