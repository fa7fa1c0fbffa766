#include <doctest.h>

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>

#include "gradlab/lattice.hpp"

using namespace gradlab;
using namespace gradlab::lattice;

TEST_CASE("square domains enumerate closure, boundary and interior") {
  const Domain q1 = build_square(1);
  CHECK(q1.vertices().size() == 9);
  CHECK(q1.boundary().size() == 8);
  CHECK(q1.interior().size() == 1);
  const Domain q2 = build_square(2);
  CHECK(q2.vertices().size() == 25);
  CHECK(q2.boundary().size() == 16);
  CHECK(q2.interior().size() == 9);
  CHECK(q2.index({-2, -2}) == 0);
  CHECK(q2.index({0, 0}) == 12);
  CHECK(q2.vertex(q2.index({1, -2})) == Vertex{1, -2});
}

TEST_CASE("N = 0 is a degenerate domain") {
  try {
    (void)build_square(0);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("degenerate domain") != std::string::npos);
  }
}

TEST_CASE("balls use the strict inequality and the outer vertex boundary") {
  const Domain b1 = ball({0, 0}, 1.0);
  REQUIRE(b1.vertices().size() == 1);
  CHECK(b1.vertices()[0] == Vertex{0, 0});
  auto bnd = b1.boundary();
  std::vector<Vertex> bv;
  for (auto i : bnd) bv.push_back(b1.vertex(i));
  std::sort(bv.begin(), bv.end());
  CHECK(bv == std::vector<Vertex>{{-1, 0}, {0, -1}, {0, 1}, {1, 0}});

  const Domain b2 = ball({0, 0}, 2.0);
  CHECK(b2.vertices().size() == 9);
  const Domain b2s = ball({5, 5}, 2.0);
  auto v0 = b2.vertices();
  auto v1 = b2s.vertices();
  REQUIRE(v0.size() == v1.size());
  for (std::size_t i = 0; i < v0.size(); ++i) CHECK(v1[i] == v0[i] + Vertex{5, 5});
  CHECK(b2s.boundary().size() == b2.boundary().size());
}

TEST_CASE("triadic partitions") {
  CHECK(triadic_partition(2, 2).size() == 1);
  CHECK(triadic_partition(1, 0).size() == 9);
  const auto cells = triadic_partition(2, 1);
  CHECK(cells.size() == 9);
  for (const auto& c : cells) CHECK(c.side() == 3);
  /// Cells tile the parent: every vertex of the level-2 cube lies in exactly one cell.
  const TriadicCube top{2, {0, 0}};
  const int h = top.half_width();
  for (int x = -h; x <= h; ++x)
    for (int y = -h; y <= h; ++y) {
      int hits = 0;
      for (const auto& c : cells) hits += c.contains({x, y});
      CHECK(hits == 1);
    }
  CHECK_THROWS_AS(triadic_partition(1, 2), std::invalid_argument);
}

TEST_CASE("edge enumeration") {
  CHECK(build_square(1).edges().size() == 12);
  CHECK(build_square(2).edges().size() == 40);
  CHECK(ball({0, 0}, 1.0).edges().empty());
  for (const Edge& e : build_square(2).edges()) {
    const Vertex d = e.head - e.tail;
    CHECK(((d == Vertex{1, 0}) || (d == Vertex{0, 1})));
  }
  /// The interior of Q_1 touches its four boundary neighbours.
  CHECK(build_square(1).energy_edges().size() == 4);
}

TEST_CASE("descriptors round-trip") {
  for (const Domain& d : {Domain::square(3, {1, -2}), ball({2, 1}, 3.5),
                          Domain::from_interior({{0, 0}, {1, 0}, {2, 0}})}) {
    const Domain e = Domain::from_descriptor(d.descriptor());
    CHECK(e.descriptor() == d.descriptor());
    CHECK(e.interior() == d.interior());
    CHECK(e.boundary() == d.boundary());
  }
}

TEST_CASE("custom interior sets") {
  const Domain path = Domain::from_interior({{-1, 0}, {0, 0}, {1, 0}});
  CHECK(path.kind() == DomainKind::custom);
  CHECK(path.interior().size() == 3);
  CHECK(path.boundary().size() == 8);
  CHECK(path.energy_edges().size() == 10);
  CHECK_THROWS_AS(Domain::from_interior({}), std::invalid_argument);
}

TEST_CASE("site weights and field extension") {
  SiteWeights w{{{1, 0}, {0, 0}, {1, 0}, {5, 5}}, {0.5, 1.0, 0.25, 0.0}};
  w.normalize();
  CHECK(w.sites.size() == 2);
  CHECK(w.total() == doctest::Approx(1.75));
  CHECK(w.l1() == doctest::Approx(1.75));

  auto d = std::make_shared<const Domain>(build_square(2));
  FieldConfig f{d, std::vector<double>(d->box_size(), 0.0)};
  f({1, 0}) = 2.0;
  f({0, 0}) = -1.0;
  CHECK(value_at(f, {9, 9}, Extension::zero) == 0.0);
  CHECK_THROWS(value_at(f, {9, 9}, Extension::strict));
  SiteWeights g{{{1, 0}, {0, 0}, {9, 9}}, {1.0, 3.0, 7.0}};
  CHECK(compile(g, *d, Extension::zero).apply(f.values) == doctest::Approx(-1.0));
  CHECK_THROWS(compile(g, *d, Extension::strict));
  const auto box = to_box(g, *d, Extension::zero);
  CHECK(box[d->index({0, 0})] == 3.0);
}
