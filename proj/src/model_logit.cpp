#include "sps/model_logit.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "sps/error.hpp"

namespace sps {

Vector LogitData::covariate_mean() const { return X.colwise().mean().transpose(); }

LogitData make_logit_data(std::vector<int> y, RowMatrix X, int categories, std::vector<std::string> names) {
  if (categories < 2) {
    throw Error(ErrorKind::data, fmt::format("outcome count must be at least 2, got {}", categories));
  }
  if (y.empty()) {
    throw Error(ErrorKind::data, "dataset has no observations");
  }
  if (X.cols() < 1) {
    throw Error(ErrorKind::data, "dataset has no covariates");
  }
  if (static_cast<Eigen::Index>(y.size()) != X.rows()) {
    throw Error(ErrorKind::data, fmt::format("{} outcomes but {} covariate rows", y.size(), X.rows()));
  }
  if (!names.empty() && static_cast<Eigen::Index>(names.size()) != X.cols()) {
    throw Error(ErrorKind::data, fmt::format("{} covariate names for {} columns", names.size(), X.cols()));
  }
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (y[t] < 1 || y[t] > categories) {
      throw Error(ErrorKind::data, fmt::format("observation {}: label {} outside 1..{}", t + 1, y[t], categories));
    }
    for (Eigen::Index i = 0; i < X.cols(); ++i) {
      if (!std::isfinite(X(static_cast<Eigen::Index>(t), i))) {
        throw Error(ErrorKind::data, fmt::format("observation {}: covariate {} is not finite", t + 1, i + 1));
      }
    }
  }
  return LogitData{std::move(y), std::move(X), categories, std::move(names)};
}

GaussianPrior make_gaussian_prior(Vector mean, Matrix cov) {
  const auto d = mean.size();
  if (d < 1 || cov.rows() != d || cov.cols() != d) {
    throw Error(ErrorKind::config, fmt::format("prior mean has length {} but covariance is {}x{}", d, cov.rows(),
                                               cov.cols()));
  }
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorKind::config, "prior covariance is not symmetric");
  }
  cov = 0.5 * (cov + cov.transpose());
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::config, "prior covariance is not positive definite");
  }
  GaussianPrior prior;
  prior.mean = std::move(mean);
  prior.chol = llt.matrixL();
  prior.cov = std::move(cov);
  prior.log_det = 2.0 * prior.chol.diagonal().array().log().sum();
  return prior;
}

GaussianPrior normalized_prior(const std::vector<Vector>& means, const std::vector<Matrix>& covs, int reference) {
  const int categories = static_cast<int>(means.size());
  if (categories < 2 || covs.size() != means.size() || reference < 0 || reference >= categories) {
    throw Error(ErrorKind::config, "normalized_prior: need matching mean/cov lists and a valid reference category");
  }
  const auto k = means[0].size();
  const auto d = k * (categories - 1);
  Vector mean(d);
  Matrix cov(d, d);
  int a = 0;
  for (int j = 0; j < categories; ++j) {
    if (j == reference) continue;
    mean.segment(a * k, k) = means[j] - means[reference];
    int b = 0;
    for (int i = 0; i < categories; ++i) {
      if (i == reference) continue;
      cov.block(a * k, b * k, k, k) = covs[reference];
      if (a == b) cov.block(a * k, b * k, k, k) += covs[j];
      ++b;
    }
    ++a;
  }
  return make_gaussian_prior(std::move(mean), std::move(cov));
}

GaussianPrior build_g_prior(const RowMatrix& X, int categories, double g, const GPriorOptions& options) {
  if (!(g > 0.0) || !std::isfinite(g)) {
    throw Error(ErrorKind::config, fmt::format("g must be positive, got {}", g));
  }
  if (categories < 2) {
    throw Error(ErrorKind::config, "g-prior needs at least two outcome categories");
  }
  const auto k = X.cols();
  const double T = static_cast<double>(X.rows());
  const Matrix xtx = X.transpose() * X;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(xtx);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(condition <= options.condition_limit)) {
    // Columns loading on the weakest direction are the collinear ones.
    const Vector weak = eig.eigenvectors().col(0).cwiseAbs();
    std::string cols;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (weak(i) >= 0.1 * weak.maxCoeff()) {
        if (!cols.empty()) cols += ", ";
        cols += i < static_cast<Eigen::Index>(options.names.size()) ? options.names[i] : fmt::format("#{}", i + 1);
      }
    }
    throw Error(ErrorKind::data, fmt::format("X'X is singular or ill-conditioned (condition {:.3g} > {:.3g}); "
                                             "collinear columns: {}",
                                             condition, options.condition_limit, cols));
  }

  Matrix sigma = g * T * xtx.ldlt().solve(Matrix::Identity(k, k));
  sigma = 0.5 * (sigma + sigma.transpose());

  const auto blocks = categories - 1;
  Matrix cov(k * blocks, k * blocks);
  for (int a = 0; a < blocks; ++a) {
    for (int b = 0; b < blocks; ++b) {
      cov.block(a * k, b * k, k, k) = (a == b ? 2.0 : 1.0) * sigma;
    }
  }
  GaussianPrior prior = make_gaussian_prior(Vector::Zero(k * blocks), std::move(cov));
  prior.g = g;
  return prior;
}

double prior_log_density(const GaussianPrior& prior, const Eigen::Ref<const Vector>& theta) {
  const Vector z = prior.chol.triangularView<Eigen::Lower>().solve(theta - prior.mean);
  const double d = static_cast<double>(prior.dim());
  return -0.5 * z.squaredNorm() - 0.5 * prior.log_det - 0.5 * d * std::log(2.0 * std::numbers::pi);
}

Theta sample_prior(const GaussianPrior& prior, Stream& stream) {
  Vector z(prior.dim());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    z(i) = stream.normal();
  }
  return prior.mean + prior.chol * z;
}

double log_predictive(const Eigen::Ref<const Vector>& theta, const LogitData& data, int t) {
  const int k = data.covariates();
  const int blocks = data.categories - 1;
  const double* x = data.X.row(t).data();
  const double* th = theta.data();
  const int label = data.y[t];

  // Streaming log-sum-exp; the reference category contributes predictor 0.
  double top = 0.0;
  double sum = 1.0;
  double chosen = 0.0;
  for (int c = 0; c < blocks; ++c) {
    double eta = 0.0;
    for (int i = 0; i < k; ++i) {
      eta += th[c * k + i] * x[i];
    }
    if (!std::isfinite(eta)) {
      throw Error(ErrorKind::numerical,
                  fmt::format("non-finite linear predictor for category {} at observation {}", c + 1, t + 1));
    }
    if (c + 1 == label) chosen = eta;
    if (eta > top) {
      sum = sum * std::exp(top - eta) + 1.0;
      top = eta;
    } else {
      sum += std::exp(eta - top);
    }
  }
  return chosen - (top + std::log(sum));
}

double log_likelihood_range(const Eigen::Ref<const Vector>& theta, const LogitData& data, int first, int last) {
  if (first < 0 || last > data.observations() || first > last) {
    throw Error(ErrorKind::config,
                fmt::format("observation range [{}, {}) invalid for T = {}", first, last, data.observations()));
  }
  if (theta.size() != data.dim()) {
    throw Error(ErrorKind::config, fmt::format("theta has length {}, expected {}", theta.size(), data.dim()));
  }
  double total = 0.0;
  for (int t = first; t < last; ++t) {
    total += log_predictive(theta, data, t);
  }
  return total;
}

double log_odds(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Vector>& x, int i, int j) {
  const auto k = x.size();
  if (k < 1 || theta.size() % k != 0) {
    throw Error(ErrorKind::config, "log_odds: theta length is not a multiple of the covariate length");
  }
  const int categories = static_cast<int>(theta.size() / k) + 1;
  if (i == j || i < 1 || j < 1 || i > categories || j > categories) {
    throw Error(ErrorKind::config, fmt::format("log_odds: categories ({}, {}) invalid for C = {}", i, j, categories));
  }
  auto predictor = [&](int c) { return c == categories ? 0.0 : theta.segment((c - 1) * k, k).dot(x); };
  return predictor(i) - predictor(j);
}

}  // namespace sps
