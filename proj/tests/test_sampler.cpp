#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "gradlab/elliptic.hpp"
#include "gradlab/sampler.hpp"
#include "gradlab/stats.hpp"

using namespace gradlab;
using namespace gradlab::sampler;

namespace {

DomainPtr square(int N) { return std::make_shared<const Domain>(lattice::build_square(N)); }

using gradlab::Vertex;

/// Site conditional h(t) = sum over the four neighbours of V(t - n_i).
std::vector<double> conditional_draws(const Potential& p, std::vector<double> nb, int n, std::uint64_t seed) {
  auto rng = stats::make_rng(seed);
  std::vector<double> out(n);
  auto eval = [&](double t) {
    potential::Derivs s{0, 0, 0};
    for (double x : nb) {
      const auto e = p.eval(t - x);
      s.v += e.v;
      s.d1 += e.d1;
      s.d2 += e.d2;
    }
    return s;
  };
  for (auto& x : out) x = sample_log_concave(eval, 4.0 * p.lambda(), 0.0, rng);
  return out;
}

/// Statistical checks use 4 standard errors: the suite makes many of them.
void check_mean(const std::vector<double>& x, double expect) {
  const auto m = stats::mean_estimate(x, double(x.size()));
  INFO("mean " << m.value << " +- " << m.se << " expected " << expect);
  CHECK(std::abs(m.value - expect) < 4.0 * m.se);
}

void check_var(const std::vector<double>& x, double ess, double expect) {
  const auto v = stats::variance_estimate(x, ess);
  INFO("variance " << v.value << " +- " << v.se << " expected " << expect);
  CHECK(std::abs(v.value - expect) < 4.0 * v.se);
}

}  // namespace

TEST_CASE("single-site conditionals") {
  const auto q = conditional_draws(potential::quadratic(), {1, 1, 1, 1}, 40000, 1);
  check_mean(q, 1.0);
  check_var(q, double(q.size()), 0.25);
  check_mean(conditional_draws(potential::quadratic(), {0, 0, 0, 0}, 20000, 2), 0.0);
  const auto c = conditional_draws(potential::cos_perturbed(0.5), {0, 0, 0, 0}, 40000, 3);
  check_mean(c, 0.0);
  /// Quadrature reference for exp(-4 V(t)) with eps = 1/2.
  check_var(c, double(c.size()), 0.4239807355109121);
}

TEST_CASE("zero sweeps return the initial configuration") {
  auto d = square(4);
  SamplerOptions o;
  o.n_samples = 1;
  o.burn_in = 0;
  o.thinning = 0;
  const auto b = sample_batch(d, BoundaryCondition::zero(*d), potential::quadratic(), o);
  REQUIRE(b.configs.size() == 1);
  for (double v : b.configs[0].values) CHECK(v == 0.0);
}

TEST_CASE("heat bath on Q_1 has variance 1/4") {
  auto d = square(1);
  SamplerOptions o;
  o.n_samples = 40000;
  o.burn_in = 10;
  o.thinning = 1;
  o.seed = 4;
  o.keep_configs = false;
  const auto b = sample_batch(d, BoundaryCondition::zero(*d), potential::quadratic(), o);
  check_var(b.series[0], b.ess[0], 0.25);
  const auto e = exact_gaussian_sample(d, BoundaryCondition::zero(*d), o);
  check_var(e.series[0], e.ess[0], 0.25);
}

TEST_CASE("Gaussian Q_16 mean and variance of phi(0) with the multigrid chain") {
  auto d = square(16);
  SamplerOptions o;
  o.n_samples = 12000;
  o.kind = SweepKind::multigrid;
  o.seed = 16;
  o.keep_configs = false;
  const auto b = sample_batch(d, BoundaryCondition::zero(*d), potential::quadratic(), o);
  INFO("ess " << b.ess[0]);
  CHECK(b.ess[0] >= 2000.0);
  check_mean(b.series[0], 0.0);
  /// Green-function reference from an independent sparse direct solve.
  check_var(b.series[0], b.ess[0], 0.7106073808868726);
}

TEST_CASE("exact sampler covariances on Q_8 and harmonic mean shift") {
  auto d = square(8);
  SamplerOptions o;
  o.n_samples = 20000;
  o.seed = 8;
  o.keep_configs = false;
  o.observables = {[](const FieldConfig& f) { return f({0, 0}) * f({1, 0}); },
                   [](const FieldConfig& f) { return f({0, 0}) * f({2, 3}); }};
  const auto b = exact_gaussian_sample(d, BoundaryCondition::zero(*d), o);
  check_var(b.series[0], b.ess[0], 0.6000932646592796);
  check_mean(b.series[1], 0.35009326465927965);
  check_mean(b.series[2], 0.13827065467034635);

  /// Linear boundary data is discrete harmonic, so the mean is the data itself.
  const auto bc = BoundaryCondition::from_function(*d, [](Vertex v) { return 0.5 * v.x - v.y; });
  o.observables = {[](const FieldConfig& f) { return f({3, -2}); }};
  o.n_samples = 4000;
  const auto h = exact_gaussian_sample(d, bc, o);
  check_mean(h.series[0], 0.0);
  check_mean(h.series[1], 3.5);
}

TEST_CASE("cos-perturbed chains agree across sweep kinds") {
  auto d = square(6);
  const auto p = potential::cos_perturbed(0.5);
  SamplerOptions o;
  o.n_samples = 6000;
  o.seed = 21;
  o.keep_configs = false;
  o.kind = SweepKind::multigrid;
  const auto a = sample_batch(d, BoundaryCondition::zero(*d), p, o);
  o.kind = SweepKind::heat_bath;
  o.thinning = 4;
  o.seed = 22;
  const auto h = sample_batch(d, BoundaryCondition::zero(*d), p, o);
  const auto va = stats::variance_estimate(a.series[0], a.ess[0]);
  const auto vh = stats::variance_estimate(h.series[0], h.ess[0]);
  CHECK(std::abs(va.value - vh.value) < 4.0 * std::hypot(va.se, vh.se));
  /// Brascamp-Lieb: Var phi(0) <= G(0,0) / lambda.
  const double G = elliptic::green_column(*d, {0, 0})[d->index({0, 0})];
  CHECK(va.value < G / 0.5);
  CHECK(va.value > G / 1.5 - 3.0 * va.se);
}

TEST_CASE("same seed, same chain") {
  auto d = square(5);
  SamplerOptions o;
  o.n_samples = 50;
  o.seed = 99;
  o.kind = SweepKind::multigrid;
  o.keep_configs = false;
  const auto p = potential::cos_perturbed(0.3);
  const auto a = sample_batch(d, BoundaryCondition::zero(*d), p, o);
  const auto b = sample_batch(d, BoundaryCondition::zero(*d), p, o);
  CHECK(a.series[0] == b.series[0]);
}

TEST_CASE("max-field event") {
  auto d = square(3);
  FieldConfig f{d, std::vector<double>(d->box_size(), 0.0)};
  CHECK(event_M_indicator(f, 3.0));
  const double L = std::log(50.0);
  f({1, 1}) = L * L + 1.0;
  CHECK_FALSE(event_M_indicator(f, 50.0));
  CHECK(max_abs_field(f) == doctest::Approx(L * L + 1.0));
}
