#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace gradlab {

struct Vertex {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

inline Vertex operator+(Vertex a, Vertex b) { return {a.x + b.x, a.y + b.y}; }
inline Vertex operator-(Vertex a, Vertex b) { return {a.x - b.x, a.y - b.y}; }
inline long norm2(Vertex v) { return long(v.x) * v.x + long(v.y) * v.y; }

/// Directed nearest-neighbour edge; head - tail is e1 or e2.
struct Edge {
  Vertex tail;
  Vertex head;
  friend bool operator==(const Edge&, const Edge&) = default;
};

}  // namespace gradlab

namespace gradlab::lattice {

enum class SiteKind : std::uint8_t { outside, interior, boundary };
enum class DomainKind { square, ball, custom };

/// Neighbour offsets in the order +e1, -e1, +e2, -e2.
inline constexpr Vertex kNeighbours[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

/// A finite region of Z^2 with Dirichlet structure.
///
/// Storage is a bounding box of the closure, row-major in (x - xmin, y - ymin),
/// so x is the slow index. For a square Q_N the box is exactly Q_N and the flat
/// index of v is (v.x + N) * (2N + 1) + (v.y + N).
///
/// Square: interior is Q_N without its outer ring, boundary is the ring.
/// Ball B_R(c) = {|y - c|^2 < R^2}: interior is the ball, boundary its outer
/// vertex boundary. Custom domains take an explicit interior set with its
/// outer vertex boundary (used for brute-force quadrature on tiny domains).
class Domain {
 public:
  static Domain square(int half_width, Vertex center = {0, 0});
  static Domain ball(Vertex center, double radius);
  static Domain from_interior(std::vector<Vertex> interior);

  DomainKind kind() const { return kind_; }
  Vertex center() const { return center_; }
  int half_width() const { return half_width_; }
  double radius() const { return radius_; }

  int xmin() const { return xmin_; }
  int ymin() const { return ymin_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t box_size() const { return std::size_t(nx_) * std::size_t(ny_); }

  bool in_box(Vertex v) const {
    return v.x >= xmin_ && v.x < xmin_ + nx_ && v.y >= ymin_ && v.y < ymin_ + ny_;
  }
  std::size_t index(Vertex v) const {
    return std::size_t(v.x - xmin_) * std::size_t(ny_) + std::size_t(v.y - ymin_);
  }
  Vertex vertex(std::size_t i) const {
    return {xmin_ + int(i / std::size_t(ny_)), ymin_ + int(i % std::size_t(ny_))};
  }
  /// Flat offset of the neighbour in direction d (see kNeighbours).
  long offset(int d) const {
    constexpr int dx[4] = {1, -1, 0, 0};
    constexpr int dy[4] = {0, 0, 1, -1};
    return long(dx[d]) * ny_ + dy[d];
  }

  SiteKind site(std::size_t i) const { return sites_[i]; }
  SiteKind site(Vertex v) const { return in_box(v) ? sites_[index(v)] : SiteKind::outside; }
  bool is_interior(Vertex v) const { return site(v) == SiteKind::interior; }
  bool in_closure(Vertex v) const { return site(v) != SiteKind::outside; }

  /// Box indices of interior (unknown) sites, in increasing order.
  const std::vector<std::size_t>& interior() const { return interior_; }
  /// Interior box indices with (x + y) % 2 == parity, in increasing order.
  const std::vector<std::size_t>& interior_parity(int parity) const { return by_parity_[parity & 1]; }
  /// Box indices of boundary sites, in increasing order.
  const std::vector<std::size_t>& boundary() const { return boundary_; }
  /// Compressed interior index of box index i, or -1.
  long interior_slot(std::size_t i) const { return slot_[i]; }
  /// Compressed interior neighbours: 4 entries per interior site, -1 if the
  /// neighbour is not interior.
  const std::vector<long>& interior_neighbours() const { return nbr_; }

  /// Vertex set: closure for squares, the interior for balls and custom sets.
  std::vector<Vertex> vertices() const;
  /// Edges with both endpoints in vertices().
  std::vector<Edge> edges() const;
  /// Edges with at least one interior endpoint and both endpoints in the
  /// closure; these carry the Gibbs energy.
  std::vector<Edge> energy_edges() const;

  nlohmann::json descriptor() const;
  static Domain from_descriptor(const nlohmann::json& j);

 private:
  Domain() = default;
  void mark_outer_boundary();
  void finish();

  DomainKind kind_ = DomainKind::square;
  Vertex center_{};
  int half_width_ = 0;
  double radius_ = 0.0;
  int xmin_ = 0, ymin_ = 0, nx_ = 0, ny_ = 0;
  std::vector<SiteKind> sites_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> boundary_;
  std::vector<std::size_t> by_parity_[2];
  std::vector<long> slot_;
  std::vector<long> nbr_;
  std::vector<Vertex> custom_;
};

using DomainPtr = std::shared_ptr<const Domain>;

/// Q_N centred at the origin.
Domain build_square(int N);
/// Ball B_R(v) with its outer vertex boundary.
Domain ball(Vertex v, double R);

/// Triadic cube of side 3^level (odd), centred at `center`.
struct TriadicCube {
  int level = 0;
  Vertex center{};
  int half_width() const;
  int side() const { return 2 * half_width() + 1; }
  bool contains(Vertex v) const;
  long volume() const { return long(side()) * side(); }
};

/// Cells of side 3^m tiling the level-n cube centred at `center`.
std::vector<TriadicCube> triadic_partition(int n, int m, Vertex center = {0, 0});

int pow3(int m);

/// Field values on the bounding box of a domain. Sites outside the closure
/// hold 0.
struct FieldConfig {
  DomainPtr domain;
  std::vector<double> values;

  double operator()(Vertex v) const { return values[domain->index(v)]; }
  double& operator()(Vertex v) { return values[domain->index(v)]; }
};

enum class Extension {
  strict,  ///< reading outside the closure is an error
  zero,    ///< values outside the closure are 0 (zero boundary convention)
};

double value_at(const FieldConfig& f, Vertex v, Extension ext);

/// Finite signed measure on vertices; a linear functional of fields.
struct SiteWeights {
  std::vector<Vertex> sites;
  std::vector<double> weights;

  double l1() const;
  double total() const;
  /// Merge duplicate sites and drop exact zeros; sorted by vertex.
  void normalize();
  SiteWeights translated(Vertex shift) const;
};

SiteWeights combine(const SiteWeights& a, double ca, const SiteWeights& b, double cb);

/// SiteWeights bound to a domain's box indices for fast evaluation.
struct CompiledWeights {
  std::vector<std::size_t> index;
  std::vector<double> weights;
  double apply(std::span<const double> values) const {
    double s = 0.0;
    for (std::size_t i = 0; i < index.size(); ++i) s += weights[i] * values[index[i]];
    return s;
  }
};

CompiledWeights compile(const SiteWeights& w, const Domain& d, Extension ext);

/// Dense box-sized copy of w (sites outside the closure dropped under zero
/// extension).
std::vector<double> to_box(const SiteWeights& w, const Domain& d, Extension ext);

}  // namespace gradlab::lattice
