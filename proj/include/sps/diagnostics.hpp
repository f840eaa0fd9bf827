#ifndef SPS_DIAGNOSTICS_HPP
#define SPS_DIAGNOSTICS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sps/model_logit.hpp"

/**
 * \file
 * \brief Grouped-particle accuracy measures.
 *
 * Particles come in J groups of N that never exchange particles, so the J
 * group means are independent. Their dispersion gives a consistent estimate of
 * the asymptotic variance of the grand mean, from which the numerical standard
 * error (NSE) and relative numerical efficiency (RNE) follow. Arrays of
 * per-particle values are J x N with one row per group.
 */

namespace sps {

struct NseEstimate {
  double grand_mean = 0.0;
  double vhat = 0.0;  ///< N/(J-1) * sum_j (mean_j - grand_mean)^2
  double nse = 0.0;   ///< sqrt(vhat / (J N))
};

std::vector<double> group_means(const Eigen::Ref<const RowMatrix>& values);

/// Throws Error(config) for fewer than two groups.
NseEstimate nse(std::span<const double> group_means, int per_group);

/// Posterior variance estimate over vhat; empty when vhat is zero.
std::optional<double> rne(const Eigen::Ref<const RowMatrix>& values, double vhat);

struct MomentSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double nse = 0.0;
  std::optional<double> rne;  ///< empty when all group means coincide
  std::vector<double> group_means;
  int dof = 0;  ///< J - 1, for the t interval
};

MomentSummary summarize_moment(std::string name, const Eigen::Ref<const RowMatrix>& values);

/// Half-width of the two-sided t(J-1) interval at the given coverage.
double t_interval_halfwidth(const MomentSummary& summary, double coverage = 0.95);

struct MLCycle {
  int t_end = 0;
  double log_mean_weight = 0.0;  ///< log of the pooled mean weight of the cycle
  double cumulative = 0.0;
};

/// Running log marginal likelihood. Each cycle contributes the log mean of its
/// C phase weights, which are the predictive likelihoods of the absorbed block.
struct MLReport {
  std::vector<MLCycle> cycles;
  std::vector<double> group_cumulative;
  double log_ml = 0.0;
  double nse = 0.0;
};

/// Folds one completed C phase (J x N log-weights) into the report. Call once
/// per cycle, before resampling. Throws Error(numerical) if any group has no
/// finite weight.
void accumulate_log_ml(const Eigen::Ref<const RowMatrix>& log_weights, int t_end, MLReport& report);

/// log(mean(exp(x))) with max subtraction.
double log_mean_exp(const Eigen::Ref<const Eigen::RowVectorXd>& log_values);

}  // namespace sps

#endif
