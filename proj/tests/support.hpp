#ifndef SPS_TESTS_SUPPORT_HPP
#define SPS_TESTS_SUPPORT_HPP

#include <cmath>
#include <string>

#include "sps/data_io.hpp"
#include "sps/engine.hpp"

namespace sps::test {

inline std::string fixture_path(const std::string& name) { return std::string(SPS_FIXTURE_DIR) + "/" + name; }

inline LogitData synthetic_mnl() {
  DatasetSpec spec;
  spec.categories = 3;
  return load_csv(fixture_path("synthetic_mnl.csv"), spec);
}

/// Random multinomial logit data with an intercept column, drawn from the
/// counter-based streams so tests do not depend on library RNG details.
inline LogitData random_data(int T, int k, int C, std::uint64_t seed) {
  RowMatrix X(T, k);
  std::vector<int> y(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    Stream s(stream_key(seed, StreamPhase::synthetic, 7, 0, 0, static_cast<std::uint64_t>(t)));
    X(t, 0) = 1.0;
    for (int i = 1; i < k; ++i) X(t, i) = s.normal();
    y[static_cast<std::size_t>(t)] = 1 + static_cast<int>(s.uniform() * C);
  }
  return make_logit_data(std::move(y), std::move(X), C);
}

inline double ks_uniform_distance(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max(d, std::max(static_cast<double>(i + 1) / n - u[i], u[i] - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace sps::test

#endif
