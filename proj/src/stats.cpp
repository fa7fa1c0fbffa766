#include "gradlab/stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace gradlab::stats {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream),
                    std::uint32_t(stream >> 32), 0x6a09e667u};
  return Rng(seq);
}

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / double(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("variance needs at least two samples");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / double(x.size() - 1);
}

double integrated_autocorrelation_time(std::span<const double> x, double c) {
  const std::size_t n = x.size();
  if (n < 4) return 1.0;
  const double m = mean(x);
  double c0 = 0.0;
  for (double v : x) c0 += (v - m) * (v - m);
  c0 /= double(n);
  if (c0 <= 0.0) return 1.0;
  /// half = 1/2 + sum of autocorrelations; the window rule is applied to it.
  double half = 0.5;
  for (std::size_t t = 1; t < n / 2; ++t) {
    double ct = 0.0;
    for (std::size_t i = 0; i + t < n; ++i) ct += (x[i] - m) * (x[i + t] - m);
    ct /= double(n);
    half += ct / c0;
    if (double(t) >= c * half) break;
  }
  return std::max(2.0 * half, 1.0);
}

double effective_sample_size(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double tau = integrated_autocorrelation_time(x);
  return std::clamp(double(x.size()) / tau, 1.0, double(x.size()));
}

double effective_sample_size(std::span<const double> x,
                             std::span<const std::size_t> chain_lengths) {
  double ess = 0.0;
  std::size_t off = 0;
  for (std::size_t len : chain_lengths) {
    if (off + len > x.size()) throw std::invalid_argument("chain lengths exceed series");
    ess += effective_sample_size(x.subspan(off, len));
    off += len;
  }
  return ess;
}

Estimate mean_estimate(std::span<const double> x, double ess) {
  const double m = mean(x);
  const double v = x.size() > 1 ? variance(x) : 0.0;
  return {m, std::sqrt(v / std::max(ess, 1.0))};
}

Estimate variance_estimate(std::span<const double> x, double ess) {
  const std::size_t blocks =
      std::clamp<std::size_t>(std::size_t(ess / 2.0), 2, std::min<std::size_t>(200, x.size()));
  return block_jackknife(x, blocks, [](std::span<const double> s) { return variance(s); });
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(x.begin(), x.end());
  const double pos = q * double(x.size() - 1);
  const std::size_t lo = std::size_t(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (pos - double(lo)) * (x[hi] - x[lo]);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(double(i) / double(a.size()) - double(j) / double(b.size())));
  }
  return d;
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double p = double(k) / double(n);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / double(n);
  const double centre = (p + z2 / (2.0 * double(n))) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / double(n) + z2 / (4.0 * double(n) * double(n))) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace gradlab::stats
