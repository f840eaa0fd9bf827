#include "sps/oracle_ref.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include <fmt/format.h>
#include <gsl/gsl_integration.h>

#include "sps/error.hpp"

namespace sps {

namespace {

constexpr double kHalfWidth = 10.0;

struct GlTable {
  std::vector<double> x;
  std::vector<double> w;
};

GlTable gauss_legendre(int nodes, double lo, double hi) {
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(nodes)), &gsl_integration_glfixed_table_free);
  if (!table) throw Error(ErrorKind::config, "cannot allocate Gauss-Legendre table");
  GlTable out;
  out.x.resize(static_cast<std::size_t>(nodes));
  out.w.resize(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    gsl_integration_glfixed_point(lo, hi, static_cast<std::size_t>(i), &out.x[static_cast<std::size_t>(i)],
                                  &out.w[static_cast<std::size_t>(i)], table.get());
  }
  return out;
}

double log_std_normal(double u) { return -0.5 * u * u - 0.5 * std::log(2.0 * std::numbers::pi); }

}  // namespace

QuadratureResult quadrature_posterior(const LogitData& data, const GaussianPrior& prior, const LinearFunctional& g,
                                      int nodes, std::optional<int> upto) {
  const int d = prior.dim();
  if (d > 2) throw Error(ErrorKind::config, fmt::format("quadrature oracle supports d <= 2, got {}", d));
  if (nodes < 2) throw Error(ErrorKind::config, "quadrature needs at least 2 nodes");
  const int last = upto.value_or(data.observations());
  const GlTable gl = gauss_legendre(nodes, -kHalfWidth, kHalfWidth);

  std::vector<double> log_terms;
  std::vector<double> values;
  const std::size_t n = gl.x.size();
  const std::size_t total = d == 1 ? n : n * n;
  log_terms.reserve(total);
  values.reserve(total);
  Vector u(d);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < (d == 1 ? 1 : n); ++b) {
      u(0) = gl.x[a];
      double log_w = std::log(gl.w[a]) + log_std_normal(gl.x[a]);
      if (d == 2) {
        u(1) = gl.x[b];
        log_w += std::log(gl.w[b]) + log_std_normal(gl.x[b]);
      }
      const Vector theta = prior.mean + prior.chol * u;
      log_terms.push_back(log_w + log_likelihood_range(theta, data, 0, last));
      values.push_back(g(theta));
    }
  }
  const double top = *std::max_element(log_terms.begin(), log_terms.end());
  double mass = 0.0;
  double first = 0.0;
  for (std::size_t i = 0; i < log_terms.size(); ++i) {
    const double w = std::exp(log_terms[i] - top);
    mass += w;
    first += w * values[i];
  }
  return QuadratureResult{first / mass, top + std::log(mass)};
}

PosteriorCdf1d::PosteriorCdf1d(const LogitData& data, const GaussianPrior& prior, int upto, int points) {
  if (prior.dim() != 1) throw Error(ErrorKind::config, "PosteriorCdf1d needs a one-parameter model");
  const double mu = prior.mean(0);
  const double sd = prior.chol(0, 0);
  grid_.resize(static_cast<std::size_t>(points));
  std::vector<double> log_density(grid_.size());
  Vector theta(1);
  for (int i = 0; i < points; ++i) {
    const double u = -kHalfWidth + 2.0 * kHalfWidth * i / (points - 1);
    theta(0) = mu + sd * u;
    grid_[static_cast<std::size_t>(i)] = theta(0);
    log_density[static_cast<std::size_t>(i)] = prior_log_density(prior, theta) + log_likelihood_range(theta, data, 0, upto);
  }
  const double top = *std::max_element(log_density.begin(), log_density.end());
  cdf_.assign(grid_.size(), 0.0);
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    const double step = grid_[i] - grid_[i - 1];
    cdf_[i] = cdf_[i - 1] + 0.5 * step * (std::exp(log_density[i - 1] - top) + std::exp(log_density[i] - top));
  }
  const double norm = cdf_.back();
  for (double& c : cdf_) c /= norm;
}

double PosteriorCdf1d::operator()(double theta) const {
  if (theta <= grid_.front()) return 0.0;
  if (theta >= grid_.back()) return 1.0;
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), theta);
  const auto i = static_cast<std::size_t>(it - grid_.begin());
  const double frac = (theta - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
  return cdf_[i - 1] + frac * (cdf_[i] - cdf_[i - 1]);
}

ParticleSystem scalar_cycle_reference(const ParticleSystem& ps, const LogitData& data, const GaussianPrior& prior,
                                      const RunConfig& cfg, const CycleRecord& fragment, int cycle,
                                      Vector* c_phase_weights) {
  ParticleSystem out = ps;
  const int J = out.groups;
  const int N = out.per_group;
  const int d = out.dim();

  // C phase.
  for (int j = 0; j < J; ++j) {
    for (int n = 0; n < N; ++n) {
      const int i = j * N + n;
      const Vector theta = out.particles.col(i);
      double acc = 0.0;
      for (int s = ps.absorbed; s < fragment.t_end; ++s) acc += log_predictive(theta, data, s);
      out.log_weights(i) = acc;
    }
  }
  out.absorbed = fragment.t_end;
  if (c_phase_weights) *c_phase_weights = out.log_weights;

  // S phase.
  for (int j = 0; j < J; ++j) {
    Stream stream(stream_key(out.seed, StreamPhase::selection, static_cast<std::uint64_t>(cycle), 0,
                             out.group_ids[static_cast<std::size_t>(j)], 0));
    double top = out.log_weights(j * N);
    for (int n = 1; n < N; ++n) top = std::max(top, out.log_weights(j * N + n));
    std::vector<double> w(static_cast<std::size_t>(N));
    double sum = 0.0;
    for (int n = 0; n < N; ++n) {
      w[static_cast<std::size_t>(n)] = std::exp(out.log_weights(j * N + n) - top);
      sum += w[static_cast<std::size_t>(n)];
    }
    std::vector<int> counts(static_cast<std::size_t>(N), 0);
    std::vector<double> draw_weights(static_cast<std::size_t>(N));
    int draws = N;
    if (cfg.resampling == Resampling::residual) {
      int assigned = 0;
      for (int n = 0; n < N; ++n) {
        const double expected = static_cast<double>(N) * (w[static_cast<std::size_t>(n)] / sum);
        const double whole = std::floor(expected);
        counts[static_cast<std::size_t>(n)] = static_cast<int>(whole);
        draw_weights[static_cast<std::size_t>(n)] = expected - whole;
        assigned += static_cast<int>(whole);
      }
      draws = N - assigned;
    } else {
      draw_weights = w;
    }
    std::vector<double> cumulative(static_cast<std::size_t>(N));
    double running = 0.0;
    int last_positive = 0;
    for (int n = 0; n < N; ++n) {
      running += draw_weights[static_cast<std::size_t>(n)];
      cumulative[static_cast<std::size_t>(n)] = running;
      if (draw_weights[static_cast<std::size_t>(n)] > 0.0) last_positive = n;
    }
    for (int k = 0; k < draws; ++k) {
      const double u = stream.uniform() * running;
      int pick = N;
      for (int n = 0; n < N; ++n) {
        if (cumulative[static_cast<std::size_t>(n)] > u) {
          pick = n;
          break;
        }
      }
      if (pick == N) pick = last_positive;
      ++counts[static_cast<std::size_t>(pick)];
    }
    const Matrix old = out.particles.middleCols(j * N, N);
    int slot = j * N;
    for (int n = 0; n < N; ++n) {
      for (int c = 0; c < counts[static_cast<std::size_t>(n)]; ++c) out.particles.col(slot++) = old.col(n);
    }
  }
  out.log_weights.setZero();

  // M phase.
  for (int r = 1; r <= fragment.steps; ++r) {
    const Matrix& sigma = fragment.proposal_cov[static_cast<std::size_t>(r - 1)];
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::numerical, "scalar reference: proposal not factorizable");
    const Matrix L = llt.matrixL();
    for (int j = 0; j < J; ++j) {
      for (int n = 0; n < N; ++n) {
        const int i = j * N + n;
        Stream stream(stream_key(out.seed, StreamPhase::mutation, static_cast<std::uint64_t>(cycle),
                                 static_cast<std::uint64_t>(r), out.group_ids[static_cast<std::size_t>(j)],
                                 static_cast<std::uint64_t>(n)));
        Vector z(d);
        for (int c = 0; c < d; ++c) z(c) = stream.normal();
        const Vector current = out.particles.col(i);
        Vector proposal = current;
        for (int a = 0; a < d; ++a) {
          double shift = 0.0;
          for (int c = 0; c <= a; ++c) shift += L(a, c) * z(c);
          proposal(a) += shift;
        }
        const double now = prior_log_density(prior, current) + log_likelihood_range(current, data, 0, fragment.t_end);
        const double cand =
            prior_log_density(prior, proposal) + log_likelihood_range(proposal, data, 0, fragment.t_end);
        const double u = stream.uniform();
        const double diff = cand - now;
        if (diff >= 0.0 || u < std::exp(diff)) out.particles.col(i) = proposal;
      }
    }
  }
  out.kernel_upto = -1;
  return out;
}

LogitData make_toy_binomial(int observations, bool with_intercept, std::uint64_t seed, double slope,
                            double intercept) {
  const int k = with_intercept ? 2 : 1;
  RowMatrix X(observations, k);
  std::vector<int> y(static_cast<std::size_t>(observations));
  for (int t = 0; t < observations; ++t) {
    Stream stream(stream_key(seed, StreamPhase::synthetic, 0, 0, 0, static_cast<std::uint64_t>(t)));
    const double x = stream.normal();
    const double eta = slope * x + (with_intercept ? intercept : 0.0);
    const double p1 = 1.0 / (1.0 + std::exp(-eta));
    y[static_cast<std::size_t>(t)] = stream.uniform() < p1 ? 1 : 2;
    if (with_intercept) {
      X(t, 0) = 1.0;
      X(t, 1) = x;
    } else {
      X(t, 0) = x;
    }
  }
  return make_logit_data(std::move(y), std::move(X), 2);
}

}  // namespace sps
