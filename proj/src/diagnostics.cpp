#include "sps/diagnostics.hpp"

#include <cmath>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "sps/error.hpp"

namespace sps {

std::vector<double> group_means(const Eigen::Ref<const RowMatrix>& values) {
  std::vector<double> means(static_cast<std::size_t>(values.rows()));
  for (Eigen::Index j = 0; j < values.rows(); ++j) {
    double sum = 0.0;
    for (Eigen::Index n = 0; n < values.cols(); ++n) {
      sum += values(j, n);
    }
    means[static_cast<std::size_t>(j)] = sum / static_cast<double>(values.cols());
  }
  return means;
}

NseEstimate nse(std::span<const double> group_means, int per_group) {
  const auto groups = group_means.size();
  if (groups < 2) {
    throw Error(ErrorKind::config, fmt::format("NSE needs at least two groups, got {}", groups));
  }
  NseEstimate out;
  double sum = 0.0;
  for (double m : group_means) sum += m;
  out.grand_mean = sum / static_cast<double>(groups);
  double ss = 0.0;
  for (double m : group_means) ss += (m - out.grand_mean) * (m - out.grand_mean);
  const double J = static_cast<double>(groups);
  const double N = static_cast<double>(per_group);
  out.vhat = N / (J - 1.0) * ss;
  out.nse = std::sqrt(out.vhat / (J * N));
  return out;
}

namespace {

double centered_sum_of_squares(const Eigen::Ref<const RowMatrix>& values, double center) {
  double ss = 0.0;
  for (Eigen::Index j = 0; j < values.rows(); ++j) {
    for (Eigen::Index n = 0; n < values.cols(); ++n) {
      const double e = values(j, n) - center;
      ss += e * e;
    }
  }
  return ss;
}

}  // namespace

std::optional<double> rne(const Eigen::Ref<const RowMatrix>& values, double vhat) {
  if (!(vhat > 0.0)) return std::nullopt;
  const auto means = group_means(values);
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= static_cast<double>(means.size());
  const double total = static_cast<double>(values.size());
  return centered_sum_of_squares(values, grand) / total / vhat;
}

MomentSummary summarize_moment(std::string name, const Eigen::Ref<const RowMatrix>& values) {
  MomentSummary s;
  s.name = std::move(name);
  s.group_means = group_means(values);
  const NseEstimate est = nse(s.group_means, static_cast<int>(values.cols()));
  s.mean = est.grand_mean;
  s.nse = est.nse;
  s.sd = std::sqrt(centered_sum_of_squares(values, est.grand_mean) / static_cast<double>(values.size()));
  s.rne = rne(values, est.vhat);
  s.dof = static_cast<int>(values.rows()) - 1;
  return s;
}

double t_interval_halfwidth(const MomentSummary& summary, double coverage) {
  boost::math::students_t dist(summary.dof);
  return boost::math::quantile(dist, 0.5 + 0.5 * coverage) * summary.nse;
}

double log_mean_exp(const Eigen::Ref<const Eigen::RowVectorXd>& log_values) {
  const double top = log_values.maxCoeff();
  if (!std::isfinite(top)) return top;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < log_values.size(); ++i) {
    sum += std::exp(log_values(i) - top);
  }
  return top + std::log(sum / static_cast<double>(log_values.size()));
}

void accumulate_log_ml(const Eigen::Ref<const RowMatrix>& log_weights, int t_end, MLReport& report) {
  const auto groups = log_weights.rows();
  if (report.group_cumulative.empty()) {
    report.group_cumulative.assign(static_cast<std::size_t>(groups), 0.0);
  } else if (static_cast<Eigen::Index>(report.group_cumulative.size()) != groups) {
    throw Error(ErrorKind::config, "accumulate_log_ml: group count changed between cycles");
  }

  double term = log_weights.maxCoeff();
  if (std::isfinite(term)) {
    const double top = term;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < groups; ++j) {
      for (Eigen::Index n = 0; n < log_weights.cols(); ++n) {
        sum += std::exp(log_weights(j, n) - top);
      }
    }
    term = top + std::log(sum / static_cast<double>(log_weights.size()));
  }
  if (!std::isfinite(term)) {
    throw Error(ErrorKind::numerical, fmt::format("all weights zero in cycle ending at observation {}", t_end));
  }
  for (Eigen::Index j = 0; j < groups; ++j) {
    const double gterm = log_mean_exp(log_weights.row(j));
    if (!std::isfinite(gterm)) {
      throw Error(ErrorKind::numerical,
                  fmt::format("weight collapse in group {} for cycle ending at observation {}", j + 1, t_end));
    }
    report.group_cumulative[static_cast<std::size_t>(j)] += gterm;
  }

  const double previous = report.cycles.empty() ? 0.0 : report.cycles.back().cumulative;
  report.cycles.push_back(MLCycle{t_end, term, previous + term});
  report.log_ml = report.cycles.back().cumulative;
  report.nse = groups >= 2 ? nse(report.group_cumulative, static_cast<int>(log_weights.cols())).nse : 0.0;
}

}  // namespace sps
