#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace gradlab::stats {

using Rng = std::mt19937_64;

/// Independent, reproducible stream for (seed, stream id).
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);

/// Integrated autocorrelation time 1 + 2 sum_t rho(t) (1 for iid data) with
/// automatic windowing: W is the smallest lag with W >= c * tau(W) / 2.
double integrated_autocorrelation_time(std::span<const double> x, double c = 6.0);

/// Effective sample size of one chain, clamped to [1, n].
double effective_sample_size(std::span<const double> x);

/// ESS summed over consecutive chains of the given lengths.
double effective_sample_size(std::span<const double> x, std::span<const std::size_t> chain_lengths);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Mean with standard error sd / sqrt(ess).
Estimate mean_estimate(std::span<const double> x, double ess);

/// Variance with a blocked jackknife standard error; at most ess / 2 blocks so
/// each block spans several autocorrelation times.
Estimate variance_estimate(std::span<const double> x, double ess);

/// Blocked jackknife for a statistic of the whole sample.
template <class Stat>
Estimate block_jackknife(std::span<const double> x, std::size_t n_blocks, Stat stat);

double quantile(std::vector<double> x, double q);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// Wilson score interval for k successes out of n (z = 1.96 by default).
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z = 1.96);

// ---------------------------------------------------------------------------

template <class Stat>
Estimate block_jackknife(std::span<const double> x, std::size_t n_blocks, Stat stat) {
  const std::size_t n = x.size();
  if (n_blocks < 2 || n < n_blocks) {
    return {stat(x), 0.0};
  }
  const std::size_t len = n / n_blocks;
  const std::size_t used = len * n_blocks;
  std::vector<double> loo(n_blocks);
  std::vector<double> buf;
  buf.reserve(used);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    buf.clear();
    for (std::size_t i = 0; i < used; ++i)
      if (i / len != b) buf.push_back(x[i]);
    loo[b] = stat(std::span<const double>(buf));
  }
  double m = 0.0;
  for (double v : loo) m += v;
  m /= double(n_blocks);
  double s = 0.0;
  for (double v : loo) s += (v - m) * (v - m);
  const double se = std::sqrt(double(n_blocks - 1) / double(n_blocks) * s);
  return {stat(x), se};
}

}  // namespace gradlab::stats
