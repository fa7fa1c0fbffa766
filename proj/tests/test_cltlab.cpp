#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "gradlab/cltlab.hpp"

using namespace gradlab;
using namespace gradlab::cltlab;

namespace {

std::vector<double> normal_draws(std::size_t n, double sd, std::uint64_t seed) {
  auto rng = stats::make_rng(seed);
  std::normal_distribution<double> g(0.0, sd);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = a + (b - a) * i / (n - 1);
  return t;
}

sampler::SampleBatch gaussian_batch(int N, std::size_t n, std::uint64_t seed) {
  auto d = std::make_shared<const lattice::Domain>(lattice::build_square(N));
  sampler::SamplerOptions o;
  o.n_samples = n;
  o.seed = seed;
  o.keep_configs = false;
  o.observables = {[](const lattice::FieldConfig& f) { return sampler::max_abs_field(f); }};
  return sampler::exact_gaussian_sample(d, sampler::BoundaryCondition::zero(*d), o);
}

}  // namespace

TEST_CASE("characteristic function basics") {
  const auto x = normal_draws(2000, 1.3, 1);
  const auto cf = char_fn(x, double(x.size()), {-1.5, -0.5, 0.0, 0.5, 1.5});
  CHECK(cf.values[2] == Complex(1.0, 0.0));
  CHECK(cf.values[0] == std::conj(cf.values[4]));
  CHECK(cf.values[1] == std::conj(cf.values[3]));
  CHECK(cf.se_re[2] == 0.0);
}

TEST_CASE("Gaussian field characteristic function at N = 32") {
  const auto b = gaussian_batch(32, 6000, 2);
  const auto t = linspace(-3.0, 3.0, 25);
  const auto cf = char_fn(b, t, Scaling::sqrt_log_N);
  /// sigma^2 = G(0,0) / log N from an independent Green solve.
  const double s2 = 0.8209739881961813 / std::log(32.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    INFO("t = " << t[i]);
    CHECK(std::abs(cf.values[i].real() - std::exp(-0.5 * s2 * t[i] * t[i])) <= 4.0 * cf.se_re[i] + 1e-15);
  }
  CHECK(cf.max_imag_z() < 4.0);
}

TEST_CASE("densities integrate to one") {
  const auto x = normal_draws(5000, 0.7, 3);
  CHECK(histogram_density(x).integral() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kde_density(x).integral() == doctest::Approx(1.0).epsilon(1e-3));
  const auto h = histogram_density(x, 0.25);
  CHECK(h.width == 0.25);
}

TEST_CASE("reference from the variance slope") {
  /// Green values G_{Q_16}(0,0), G_{Q_32}(0,0) from the oracle script.
  const auto r = fit_reference({16, 32}, {0.7106073808868726, 0.8209739881961813}, {});
  CHECK(r.g == doctest::Approx(0.15922535704487928).epsilon(1e-12));
  CHECK(r.source == "variance_slope");
  const auto one = fit_reference({16}, {0.7106073808868726}, {});
  CHECK(one.g == doctest::Approx(0.25629743610614647).epsilon(1e-12));
  CHECK(r.charfn(0.0) == 1.0);
  CHECK(r.density(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI * r.g)));
}

TEST_CASE("density gap is consistent for data drawn from the reference") {
  GaussianReference ref;
  ref.g = 0.5;
  const auto x = normal_draws(4000, std::sqrt(0.5), 4);
  for (auto method : {DensityMethod::histogram, DensityMethod::kde}) {
    GapOptions o;
    o.method = method;
    o.bootstrap = 100;
    o.seed = 9;
    const auto gap = clt_gap(x, ref, o);
    CHECK(gap.sup_gap <= gap.null_hi);
    CHECK(gap.band_lo <= gap.band_hi);
  }
}

TEST_CASE("regime split on an exact Gaussian characteristic function") {
  GaussianReference ref;
  ref.g = 0.2;
  CharFnEstimate cf;
  cf.t = linspace(0.0, 12.0, 1201);
  for (double t : cf.t) {
    cf.values.push_back(ref.charfn(t));
    cf.se_re.push_back(0.0);
    cf.se_im.push_back(0.0);
  }
  const double logN = std::log(64.0);
  const auto r = regime_split(cf, ref, 1.0, 2.0, logN);
  CHECK(r.I_small < 1e-14);
  CHECK(r.I_mid < 1e-14);
  CHECK(r.cut == doctest::Approx(2.0 * std::sqrt(logN)));
  CHECK(r.I_large > 0.0);

  const auto b = gaussian_batch(64, 2000, 5);
  const auto emp = char_fn(b, linspace(0.0, 12.0, 241), Scaling::sqrt_log_N);
  const auto a1 = regime_split(emp, ref, 0.5, 2.0, logN);
  const auto a2 = regime_split(emp, ref, 1.5, 2.0, logN);
  CHECK(std::isfinite(a1.I_small));
  CHECK(std::isfinite(a1.I_large));
  CHECK(a2.I_mid <= a1.I_mid);
}

TEST_CASE("Gaussian factorization variances at N = 64, k = 1") {
  const auto v = gaussian_factor_variances(64, 1, 0.5, 8.0);
  CHECK(v.lhs == doctest::Approx(0.16814341600660826).epsilon(1e-8));
  CHECK(v.outer == doctest::Approx(0.01014196979637072).epsilon(1e-8));
  CHECK(v.inner == doctest::Approx(0.13439405903122875).epsilon(1e-8));
}

TEST_CASE("factorization check at s = 0 and for the Gaussian field") {
  FactorOptions o;
  o.N = 32;
  o.k = 1;
  o.s_grid = {0.0, 0.3};
  o.samples = 1500;
  o.inner_samples = 1500;
  o.seed = 6;
  const auto r = factorization_check(potential::quadratic(), o);
  REQUIRE(r.points.size() == 2);
  CHECK(r.points[0].lhs == Complex(1.0, 0.0));
  CHECK(r.points[0].rhs == Complex(1.0, 0.0));
  CHECK(std::abs(r.points[1].z) < 4.0);
  o.s_grid = {0.8};
  CHECK_THROWS(factorization_check(potential::quadratic(), o));
}

TEST_CASE("Mermin-Wagner characteristic probe for the Gaussian field") {
  const auto b = gaussian_batch(32, 3000, 7);
  const double logN = std::log(32.0);
  const auto r = mw_char_probe(b.series[0], b.ess[0], logN, {0.0, 0.5, 1.0, 2.0, 4.0});
  CHECK(r.points[0].modulus == doctest::Approx(1.0));
  CHECK(r.eps1 > 0.0);
  CHECK(r.eps1 < 1.0);
  CHECK(std::isfinite(r.C));
}

TEST_CASE("Brascamp-Lieb exponential probe") {
  const auto x = normal_draws(20000, 0.8, 8);
  const auto r = bl_exp_probe(x, double(x.size()), 0.64, {0.0, 0.5, 1.0, 1.5}, 1.0);
  CHECK(r.points[0].log_mgf == 0.0);
  CHECK(r.points[0].bound == 0.0);
  CHECK_FALSE(r.any_violation());
  const auto big = bl_exp_probe(x, double(x.size()), 0.64, {1e4}, 1.0);
  CHECK(big.points[0].dropped);
}

TEST_CASE("tail event frequency") {
  const std::vector<double> zeros(100, 0.0);
  const auto z = tail_event_probe(zeros, 64.0);
  CHECK(z.count == 0);
  CHECK(z.frequency == 0.0);
  const auto b = gaussian_batch(64, 500, 10);
  const auto t = tail_event_probe(b.series[1], 64.0);
  CHECK(t.n == 500);
  CHECK(t.ci_hi <= 1e-2);
}
