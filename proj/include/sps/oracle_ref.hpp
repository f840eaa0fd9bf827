#ifndef SPS_ORACLE_REF_HPP
#define SPS_ORACLE_REF_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "sps/engine.hpp"

/**
 * \file
 * \brief Slow, exact references for verifying the sampler.
 *
 * Deterministic quadrature posteriors for models with at most two parameters,
 * and a single-threaded loop-by-loop implementation of one nonadaptive cycle
 * that follows the engine's random stream contract and must reproduce it
 * bit for bit.
 */

namespace sps {

struct QuadratureResult {
  double posterior_mean = 0.0;
  double log_ml = 0.0;
};

/// Tensor-product Gauss-Legendre integration over +-10 prior standard
/// deviations in whitened coordinates. Uses observations [0, upto) (all by
/// default). Throws Error(config) when the dimension exceeds 2 or nodes < 2.
QuadratureResult quadrature_posterior(const LogitData& data, const GaussianPrior& prior, const LinearFunctional& g,
                                      int nodes = 401, std::optional<int> upto = std::nullopt);

/// Posterior CDF of a one-parameter model, tabulated by the trapezoid rule on
/// a uniform grid over +-10 prior standard deviations.
class PosteriorCdf1d {
 public:
  PosteriorCdf1d(const LogitData& data, const GaussianPrior& prior, int upto, int points = 20001);

  double operator()(double theta) const;

 private:
  std::vector<double> grid_;
  std::vector<double> cdf_;
};

/// Runs one cycle (C phase to fragment.t_end, S phase, fragment.steps M steps)
/// on a copy of `ps` with plain loops. `c_phase_weights`, when given, receives
/// the log-weights at the end of the C phase.
ParticleSystem scalar_cycle_reference(const ParticleSystem& ps, const LogitData& data, const GaussianPrior& prior,
                                      const RunConfig& cfg, const CycleRecord& fragment, int cycle,
                                      Vector* c_phase_weights = nullptr);

/// Synthetic binomial logit data: x_t ~ N(0, 1), outcome 1 with probability
/// logistic(slope * x_t + intercept), else 2. Columns are [x] or [1, x].
LogitData make_toy_binomial(int observations, bool with_intercept, std::uint64_t seed, double slope = 1.0,
                            double intercept = -0.5);

}  // namespace sps

#endif
