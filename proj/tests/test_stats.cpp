#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gradlab/stats.hpp"

using namespace gradlab::stats;

TEST_CASE("moments") {
  const std::vector<double> x{1, 2, 3, 4};
  CHECK(mean(x) == 2.5);
  CHECK(variance(x) == doctest::Approx(5.0 / 3.0));
  CHECK(quantile({3, 1, 2, 4, 5}, 0.5) == doctest::Approx(3.0));
}

TEST_CASE("streams are reproducible and distinct") {
  auto a = make_rng(5, 1), b = make_rng(5, 1), c = make_rng(5, 2);
  const auto xa = a(), xb = b(), xc = c();
  CHECK(xa == xb);
  CHECK(xa != xc);
}

TEST_CASE("autocorrelation of an AR(1) chain") {
  /// For x_{t+1} = r x_t + noise the integrated time is (1 + r) / (1 - r).
  auto rng = make_rng(11);
  std::normal_distribution<double> z;
  const double r = 0.8;
  std::vector<double> x(200000);
  double s = 0.0;
  for (auto& v : x) v = s = r * s + z(rng);
  const double tau = integrated_autocorrelation_time(x);
  CHECK(tau == doctest::Approx(9.0).epsilon(0.1));
  CHECK(effective_sample_size(x) == doctest::Approx(double(x.size()) / tau));

  std::vector<double> iid(50000);
  for (auto& v : iid) v = z(rng);
  CHECK(integrated_autocorrelation_time(iid) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("variance estimate covers the truth for iid normals") {
  auto rng = make_rng(3);
  std::normal_distribution<double> z(0.0, 2.0);
  std::vector<double> x(40000);
  for (auto& v : x) v = z(rng);
  const auto e = variance_estimate(x, double(x.size()));
  CHECK(std::abs(e.value - 4.0) < 3.0 * e.se);
  /// Normal data: SE of the variance is about sigma^2 sqrt(2 / n).
  CHECK(e.se == doctest::Approx(4.0 * std::sqrt(2.0 / 40000.0)).epsilon(0.15));
}

TEST_CASE("KS distance and Wilson interval") {
  CHECK(ks_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_distance({1, 2, 3}, {4, 5, 6}) == 1.0);
  const auto [lo, hi] = wilson_interval(0, 100);
  CHECK(lo == 0.0);
  CHECK(hi == doctest::Approx(0.037).epsilon(0.01));
}
