#ifndef SPS_MODEL_LOGIT_HPP
#define SPS_MODEL_LOGIT_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sps/rng.hpp"

namespace sps {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Normalized multinomial logit parameter: the stacked coefficient blocks of
/// categories 1..C-1, each of length k. Category C is the reference and has an
/// implicit zero block.
using Theta = Vector;

/// Outcomes and covariates for one dataset.
struct LogitData {
  std::vector<int> y;  ///< labels in 1..categories
  RowMatrix X;         ///< one row of covariates per observation
  int categories = 2;
  std::vector<std::string> names;

  int observations() const noexcept { return static_cast<int>(y.size()); }
  int covariates() const noexcept { return static_cast<int>(X.cols()); }
  int dim() const noexcept { return covariates() * (categories - 1); }
  Vector covariate_mean() const;
};

/// Validates and assembles a dataset. Throws Error(data) on empty input, labels
/// outside 1..categories, shape mismatch or non-finite covariates.
LogitData make_logit_data(std::vector<int> y, RowMatrix X, int categories, std::vector<std::string> names = {});

struct GaussianPrior {
  Vector mean;
  Matrix cov;
  Matrix chol;  ///< lower-triangular, chol * chol' == cov
  double log_det = 0.0;
  std::optional<double> g;

  int dim() const noexcept { return static_cast<int>(mean.size()); }
};

/// Factorizes and validates a prior; throws Error(config) if cov is not
/// symmetric (relative 1e-10) or not positive definite.
GaussianPrior make_gaussian_prior(Vector mean, Matrix cov);

/// Prior of the normalized parameter implied by independent category priors
/// theta_c ~ N(means[c], covs[c]), c = 0..C-1, after subtracting the block of
/// `reference` (0-based). Blocks are ordered by category with the reference
/// omitted: mean_j - mean_ref, var = cov_j + cov_ref, cross-cov = cov_ref.
GaussianPrior normalized_prior(const std::vector<Vector>& means, const std::vector<Matrix>& covs, int reference);

struct GPriorOptions {
  double condition_limit = 1e12;
  std::vector<std::string> names;  ///< covariate labels used in diagnostics
};

/// Exchangeable Zellner g-prior: each category block N(0, Sigma) with
/// Sigma = g * T * (X'X)^{-1}, normalized on the last category.
GaussianPrior build_g_prior(const RowMatrix& X, int categories, double g, const GPriorOptions& options = {});

double prior_log_density(const GaussianPrior& prior, const Eigen::Ref<const Vector>& theta);

Theta sample_prior(const GaussianPrior& prior, Stream& stream);

/// log P(Y_t = y_t | x_t, theta) for 0-based observation t.
double log_predictive(const Eigen::Ref<const Vector>& theta, const LogitData& data, int t);

/// Sum of log_predictive over observations [first, last), 0-based.
double log_likelihood_range(const Eigen::Ref<const Vector>& theta, const LogitData& data, int first, int last);

/// (theta_i - theta_j)' x for categories i != j in 1..C; the block of the last
/// category is zero.
double log_odds(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Vector>& x, int i, int j);

}  // namespace sps

#endif
