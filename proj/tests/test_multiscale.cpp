#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "gradlab/elliptic.hpp"
#include "gradlab/multiscale.hpp"

using namespace gradlab;
using namespace gradlab::multiscale;
using gradlab::Vertex;

namespace {

double variance_of(const SiteWeights& w, const Domain& d) {
  const auto box = lattice::to_box(w, d, Extension::zero);
  return elliptic::quadratic_form(d, box);
}

std::vector<int> range(int a, int b) {
  std::vector<int> r;
  for (int i = a; i <= b; ++i) r.push_back(i);
  return r;
}

}  // namespace

TEST_CASE("scale ladder radii") {
  const auto l = make_ladder(64);
  CHECK(l.r(0) == doctest::Approx(64.0));
  CHECK(l.r(1) == doctest::Approx(64.0 / std::exp(1.0)));
  CHECK(l.k_max == 2);
  const auto s = l.scale(1);
  CHECK(s.r_plus == doctest::Approx(s.r * (1.0 + 1.0 / std::sqrt(s.r))));
  CHECK(s.r_minus == doctest::Approx(s.r * (1.0 - 1.0 / std::sqrt(s.r))));
  CHECK_THROWS(make_ladder(64, 0.0));
}

TEST_CASE("window radii on N = 64 and N = 32") {
  const auto l = make_ladder(64);
  CHECK(window(l, 0, WindowKind::center).radii == range(62, 66));
  CHECK(window(l, 0, WindowKind::minus).radii == range(55, 57));
  CHECK(window(l, 1, WindowKind::center).radii == range(23, 24));
  CHECK(window(l, 1, WindowKind::plus).radii == range(27, 29));
  CHECK(window(l, 1, WindowKind::minus).radii == range(18, 19));
  CHECK(window(l, 2, WindowKind::center).radii == range(8, 9));
  const auto w = window(l, 1, WindowKind::center);
  CHECK(w.weight == doctest::Approx(0.5));
  CHECK_FALSE(w.fallback);

  const auto m = make_ladder(32);
  CHECK(window(m, 1, WindowKind::center).radii == range(11, 12));
  CHECK(window(m, 1, WindowKind::minus).radii == range(8, 8));
  CHECK(window(m, 2, WindowKind::center).radii == range(4, 4));
}

TEST_CASE("harmonic measure of the ball of radius 2") {
  const auto& w = circle_weights(2.0);
  CHECK(w.total() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < w.sites.size(); ++i) {
    const Vertex v = w.sites[i];
    const long n = norm2(v);
    if (n == 4) CHECK(w.weights[i] == doctest::Approx(0.125).epsilon(1e-10));
    if (n == 5) CHECK(w.weights[i] == doctest::Approx(0.0625).epsilon(1e-10));
  }
}

TEST_CASE("circle averages of constant and linear fields") {
  auto d = std::make_shared<const Domain>(lattice::build_square(20));
  FieldConfig c{d, std::vector<double>(d->box_size(), 0.0)};
  FieldConfig lin = c;
  for (std::size_t i = 0; i < d->box_size(); ++i) {
    const Vertex v = d->vertex(i);
    c.values[i] = 3.0;
    lin.values[i] = 2.0 * v.x - 0.5 * v.y + 1.0;
  }
  CHECK(circle_average(c, {0, 0}, 7.3) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(circle_average(lin, {2, -3}, 6.0) == doctest::Approx(2.0 * 2 + 1.5 + 1.0).epsilon(1e-10));
}

TEST_CASE("Gaussian variances of circle and window averages") {
  const Domain q64 = lattice::build_square(64);
  CHECK(variance_of(circle_weights(8.0), q64) == doctest::Approx(0.33862912208807855).epsilon(1e-8));
  const auto l64 = make_ladder(64);
  CHECK(variance_of(window_weights(window(l64, 1, WindowKind::center)), q64) ==
        doctest::Approx(0.16814341600660826).epsilon(1e-8));

  const Domain q32 = lattice::build_square(32);
  CHECK(variance_of(circle_weights(8.0), q32) == doctest::Approx(0.2282991367819332).epsilon(1e-8));
  const auto l32 = make_ladder(32);
  CHECK(variance_of(rho_weights({0, 0}, 1, l32).weights, q32) ==
        doctest::Approx(0.10727065979748276).epsilon(1e-8));
}

TEST_CASE("annulus weights at N = 64, k = 1") {
  const auto l = make_ladder(64);
  const auto rho = rho_weights({0, 0}, 1, l);
  CHECK(std::abs(rho.weights.total()) < 1e-12);
  CHECK(rho.weights.l1() == doctest::Approx(2.0).epsilon(1e-10));
  auto get = [&](Vertex v) {
    for (std::size_t i = 0; i < rho.weights.sites.size(); ++i)
      if (rho.weights.sites[i] == v) return rho.weights.weights[i];
    return 0.0;
  };
  CHECK(get({8, 0}) == doctest::Approx(0.01184594533506148).epsilon(1e-9));
  CHECK(get({9, 0}) == doctest::Approx(0.01067911235944539).epsilon(1e-9));
  CHECK(get({6, 6}) == doctest::Approx(0.011890371985265389).epsilon(1e-9));
  CHECK(get({18, 0}) == doctest::Approx(-0.004972615081357659).epsilon(1e-9));
  CHECK(get({19, 0}) == doctest::Approx(-0.004768265813529164).epsilon(1e-9));
  CHECK(get({13, 13}) == doctest::Approx(-0.006126954428433548).epsilon(1e-9));

  const auto shifted = rho_weights({5, -2}, 1, l);
  CHECK(shifted.weights.sites.size() == rho.weights.sites.size());
}

TEST_CASE("A_k equals the rho functional and annihilates harmonic functions") {
  const auto l = make_ladder(64);
  auto d = std::make_shared<const Domain>(lattice::build_square(64));
  auto rng = stats::make_rng(5);
  std::normal_distribution<double> g;
  FieldConfig f{d, std::vector<double>(d->box_size(), 0.0)};
  for (auto i : d->interior()) f.values[i] = g(rng);
  const Vertex v{3, -4};
  const auto s = x_process(f, v, 1, l);
  const auto rho = rho_weights(v, 1, l);
  double via_rho = 0.0;
  for (std::size_t i = 0; i < rho.weights.sites.size(); ++i)
    via_rho += rho.weights.weights[i] * f(rho.weights.sites[i]);
  CHECK(s.A == doctest::Approx(via_rho).epsilon(1e-10));
  CHECK(s.A == doctest::Approx(s.X_next - s.X_minus).epsilon(1e-12));
  CHECK(s.E == doctest::Approx(s.X - s.X_minus).epsilon(1e-12));

  const auto rep = check_harmonic_annihilation(rho_weights({0, 0}, 1, l), l, 5, 7);
  CHECK(rep.constant_residual < 1e-12);
  CHECK(rep.pass());
}

TEST_CASE("coupling probe with constant boundary data") {
  /// A_k kills constants, so data f = 1 and f = 0 give the same law.
  const auto l = make_ladder(32);
  CouplingOptions o;
  o.n_samples = 400;
  o.seed = 3;
  o.bootstrap = 200;
  const auto r = coupling_probe(l, 1, {0, 0}, [](Vertex) { return 1.0; }, potential::quadratic(), o);
  CHECK(r.n == 400);
  CHECK(r.max_abs_f == doctest::Approx(1.0));
  CHECK(r.p_value > 0.001);
  CHECK_THROWS(coupling_probe(l, 1, {0, 0}, [](Vertex) { return 1e3; }, potential::quadratic(), o));
}
