#include "gradlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace gradlab::lattice {

Domain Domain::square(int half_width, Vertex center) {
  if (half_width < 1) throw std::invalid_argument("degenerate domain: half width must be >= 1");
  Domain d;
  d.kind_ = DomainKind::square;
  d.center_ = center;
  d.half_width_ = half_width;
  d.xmin_ = center.x - half_width;
  d.ymin_ = center.y - half_width;
  d.nx_ = d.ny_ = 2 * half_width + 1;
  d.sites_.assign(d.box_size(), SiteKind::interior);
  for (int i = 0; i < d.nx_; ++i)
    for (int j = 0; j < d.ny_; ++j)
      if (i == 0 || j == 0 || i == d.nx_ - 1 || j == d.ny_ - 1)
        d.sites_[std::size_t(i) * d.ny_ + j] = SiteKind::boundary;
  d.finish();
  return d;
}

Domain Domain::ball(Vertex center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("ball radius must be positive");
  Domain d;
  d.kind_ = DomainKind::ball;
  d.center_ = center;
  d.radius_ = radius;
  // Ball points have |y_i| <= ceil(R) - 1 and the boundary adds one layer.
  const int reach = int(std::ceil(radius));
  d.half_width_ = reach;
  d.xmin_ = center.x - reach;
  d.ymin_ = center.y - reach;
  d.nx_ = d.ny_ = 2 * reach + 1;
  d.sites_.assign(d.box_size(), SiteKind::outside);
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < d.box_size(); ++i) {
    const Vertex v = d.vertex(i) - center;
    if (double(norm2(v)) < r2) d.sites_[i] = SiteKind::interior;
  }
  d.mark_outer_boundary();
  d.finish();
  return d;
}

Domain Domain::from_interior(std::vector<Vertex> interior) {
  if (interior.empty()) throw std::invalid_argument("degenerate domain: empty interior");
  std::sort(interior.begin(), interior.end());
  interior.erase(std::unique(interior.begin(), interior.end()), interior.end());
  Domain d;
  d.kind_ = DomainKind::custom;
  int x0 = interior[0].x, x1 = x0, y0 = interior[0].y, y1 = y0;
  for (Vertex v : interior) {
    x0 = std::min(x0, v.x);
    x1 = std::max(x1, v.x);
    y0 = std::min(y0, v.y);
    y1 = std::max(y1, v.y);
  }
  d.center_ = {(x0 + x1) / 2, (y0 + y1) / 2};
  d.custom_ = interior;
  d.xmin_ = x0 - 1;
  d.ymin_ = y0 - 1;
  d.nx_ = x1 - x0 + 3;
  d.ny_ = y1 - y0 + 3;
  d.half_width_ = std::max(d.nx_, d.ny_) / 2;
  d.sites_.assign(d.box_size(), SiteKind::outside);
  for (Vertex v : interior) d.sites_[d.index(v)] = SiteKind::interior;
  d.mark_outer_boundary();
  d.finish();
  return d;
}

void Domain::mark_outer_boundary() {
  for (std::size_t i = 0; i < box_size(); ++i) {
    if (sites_[i] != SiteKind::outside) continue;
    const Vertex v = vertex(i);
    for (const Vertex& e : kNeighbours) {
      const Vertex w = v + e;
      if (in_box(w) && sites_[index(w)] == SiteKind::interior) {
        sites_[i] = SiteKind::boundary;
        break;
      }
    }
  }
}

void Domain::finish() {
  interior_.clear();
  boundary_.clear();
  by_parity_[0].clear();
  by_parity_[1].clear();
  slot_.assign(box_size(), -1);
  for (std::size_t i = 0; i < box_size(); ++i) {
    if (sites_[i] == SiteKind::interior) {
      slot_[i] = long(interior_.size());
      interior_.push_back(i);
      const Vertex v = vertex(i);
      by_parity_[(v.x + v.y) & 1].push_back(i);
    } else if (sites_[i] == SiteKind::boundary) {
      boundary_.push_back(i);
    }
  }
  if (interior_.empty()) throw std::invalid_argument("domain has no interior vertices");
  nbr_.assign(interior_.size() * 4, -1);
  for (std::size_t k = 0; k < interior_.size(); ++k) {
    const Vertex v = vertex(interior_[k]);
    for (int d = 0; d < 4; ++d) {
      const Vertex w = v + kNeighbours[d];
      if (!in_box(w)) throw std::logic_error("interior vertex touches the box edge");
      nbr_[4 * k + d] = slot_[index(w)];
    }
  }
}

std::vector<Vertex> Domain::vertices() const {
  std::vector<Vertex> out;
  for (std::size_t i = 0; i < box_size(); ++i) {
    const bool take = kind_ == DomainKind::square ? sites_[i] != SiteKind::outside
                                                  : sites_[i] == SiteKind::interior;
    if (take) out.push_back(vertex(i));
  }
  return out;
}

std::vector<Edge> Domain::edges() const {
  auto member = [&](Vertex v) {
    const SiteKind s = site(v);
    return kind_ == DomainKind::square ? s != SiteKind::outside : s == SiteKind::interior;
  };
  std::vector<Edge> out;
  for (std::size_t i = 0; i < box_size(); ++i) {
    const Vertex v = vertex(i);
    if (!member(v)) continue;
    for (Vertex e : {Vertex{1, 0}, Vertex{0, 1}})
      if (member(v + e)) out.push_back({v, v + e});
  }
  return out;
}

std::vector<Edge> Domain::energy_edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < box_size(); ++i) {
    const Vertex v = vertex(i);
    const SiteKind s = sites_[i];
    if (s == SiteKind::outside) continue;
    for (Vertex e : {Vertex{1, 0}, Vertex{0, 1}}) {
      const SiteKind t = site(v + e);
      if (t == SiteKind::outside) continue;
      if (s == SiteKind::interior || t == SiteKind::interior) out.push_back({v, v + e});
    }
  }
  return out;
}

nlohmann::json Domain::descriptor() const {
  if (kind_ == DomainKind::square) {
    nlohmann::json j{{"kind", "square"}, {"N", half_width_}};
    if (center_ != Vertex{0, 0}) j["center"] = {center_.x, center_.y};
    return j;
  }
  if (kind_ == DomainKind::ball)
    return {{"kind", "ball"}, {"center", {center_.x, center_.y}}, {"R", radius_}};
  nlohmann::json pts = nlohmann::json::array();
  for (Vertex v : custom_) pts.push_back({v.x, v.y});
  return {{"kind", "custom"}, {"interior", pts}};
}

Domain Domain::from_descriptor(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  Vertex c{0, 0};
  if (j.contains("center")) c = {j["center"].at(0).get<int>(), j["center"].at(1).get<int>()};
  if (kind == "square") return square(j.at("N").get<int>(), c);
  if (kind == "ball") return ball(c, j.at("R").get<double>());
  if (kind == "custom") {
    std::vector<Vertex> pts;
    for (const auto& p : j.at("interior")) pts.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    return from_interior(std::move(pts));
  }
  throw std::invalid_argument("unknown domain kind: " + kind);
}

Domain build_square(int N) {
  if (N < 1) throw std::invalid_argument("degenerate domain: N must be >= 1");
  return Domain::square(N);
}

Domain ball(Vertex v, double R) { return Domain::ball(v, R); }

int pow3(int m) {
  if (m < 0) throw std::invalid_argument("pow3: negative exponent");
  int p = 1;
  for (int i = 0; i < m; ++i) p *= 3;
  return p;
}

int TriadicCube::half_width() const { return (pow3(level) - 1) / 2; }

bool TriadicCube::contains(Vertex v) const {
  const int h = half_width();
  return std::abs(v.x - center.x) <= h && std::abs(v.y - center.y) <= h;
}

std::vector<TriadicCube> triadic_partition(int n, int m, Vertex center) {
  if (m < 0 || m > n) throw std::invalid_argument("triadic_partition: need 0 <= m <= n");
  const int step = pow3(m);
  const int reach = (pow3(n - m) - 1) / 2;
  std::vector<TriadicCube> cells;
  for (int i = -reach; i <= reach; ++i)
    for (int j = -reach; j <= reach; ++j)
      cells.push_back({m, {center.x + i * step, center.y + j * step}});
  return cells;
}

double value_at(const FieldConfig& f, Vertex v, Extension ext) {
  const Domain& d = *f.domain;
  if (d.in_closure(v)) return f.values[d.index(v)];
  if (ext == Extension::zero) return 0.0;
  throw std::out_of_range("vertex outside the field's domain");
}

double SiteWeights::l1() const {
  double s = 0.0;
  for (double w : weights) s += std::abs(w);
  return s;
}

double SiteWeights::total() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void SiteWeights::normalize() {
  std::map<Vertex, double> acc;
  for (std::size_t i = 0; i < sites.size(); ++i) acc[sites[i]] += weights[i];
  sites.clear();
  weights.clear();
  for (const auto& [v, w] : acc)
    if (w != 0.0) {
      sites.push_back(v);
      weights.push_back(w);
    }
}

SiteWeights SiteWeights::translated(Vertex shift) const {
  SiteWeights out = *this;
  for (Vertex& v : out.sites) v = v + shift;
  return out;
}

SiteWeights combine(const SiteWeights& a, double ca, const SiteWeights& b, double cb) {
  SiteWeights out;
  out.sites.reserve(a.sites.size() + b.sites.size());
  for (std::size_t i = 0; i < a.sites.size(); ++i) {
    out.sites.push_back(a.sites[i]);
    out.weights.push_back(ca * a.weights[i]);
  }
  for (std::size_t i = 0; i < b.sites.size(); ++i) {
    out.sites.push_back(b.sites[i]);
    out.weights.push_back(cb * b.weights[i]);
  }
  out.normalize();
  return out;
}

CompiledWeights compile(const SiteWeights& w, const Domain& d, Extension ext) {
  CompiledWeights c;
  for (std::size_t i = 0; i < w.sites.size(); ++i) {
    if (d.in_closure(w.sites[i])) {
      c.index.push_back(d.index(w.sites[i]));
      c.weights.push_back(w.weights[i]);
    } else if (ext == Extension::strict) {
      throw std::out_of_range("weights reach outside the domain");
    }
  }
  return c;
}

std::vector<double> to_box(const SiteWeights& w, const Domain& d, Extension ext) {
  std::vector<double> out(d.box_size(), 0.0);
  const CompiledWeights c = compile(w, d, ext);
  for (std::size_t i = 0; i < c.index.size(); ++i) out[c.index[i]] += c.weights[i];
  return out;
}

}  // namespace gradlab::lattice
