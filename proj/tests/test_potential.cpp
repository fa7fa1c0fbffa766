#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gradlab/potential.hpp"

using namespace gradlab::potential;

TEST_CASE("quadratic potential") {
  const Potential q = quadratic();
  CHECK(q.value(2.0) == 2.0);
  CHECK(q.d2(17.3) == 1.0);
  CHECK(q.value(-0.7) == q.value(0.7));
  const auto r = verify_assumptions(q, 10.0);
  CHECK(r.ok());
  CHECK(r.lambda_hat == 1.0);
  CHECK(r.Lambda_hat == 1.0);
  CHECK(r.symmetry_residual == 0.0);
}

TEST_CASE("cos-perturbed potential") {
  const Potential c = cos_perturbed(0.5);
  CHECK(c.d2(0.0) == doctest::Approx(0.5));
  CHECK(c.d2(std::numbers::pi) == doctest::Approx(1.5));
  CHECK(c.lambda() == 0.5);
  CHECK(c.Lambda() == 1.5);
  const auto d = c.eval(0.3);
  CHECK(d.v == doctest::Approx(c.value(0.3)));
  CHECK(d.d1 == doctest::Approx(c.d1(0.3)));
  CHECK(d.d2 == doctest::Approx(c.d2(0.3)));
  const auto r = verify_assumptions(c);
  CHECK(r.ok());
  CHECK(r.lambda_hat == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.Lambda_hat == doctest::Approx(1.5).epsilon(1e-6));
  CHECK_NOTHROW(cos_perturbed(0.999));
  CHECK_THROWS_AS(cos_perturbed(1.0), std::invalid_argument);
  CHECK_THROWS_AS(cos_perturbed(0.0), std::invalid_argument);
}

TEST_CASE("a potential whose curvature dips below its declared lambda is flagged") {
  Potential::Custom fns{[](double t) { return 0.5 * t * t - 0.8 * std::cos(t); },
                        [](double t) { return t + 0.8 * std::sin(t); },
                        [](double t) { return 1.0 + 0.8 * std::cos(t); }};
  const Potential bad = custom("broken", fns, 0.5, 1.8, 0.8);
  const auto r = verify_assumptions(bad);
  CHECK_FALSE(r.lambda_ok);
  CHECK(r.Lambda_ok);
  CHECK_FALSE(r.ok());
}

TEST_CASE("descriptors round-trip") {
  const Potential c = cos_perturbed(0.25);
  const Potential d = from_descriptor(c.descriptor());
  CHECK(d.kind() == Potential::Kind::cos_perturbed);
  CHECK(d.eps() == 0.25);
}
