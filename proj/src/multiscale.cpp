#include "gradlab/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

#include "gradlab/elliptic.hpp"
#include "gradlab/stats.hpp"

namespace gradlab::multiscale {

double ScaleLadder::r(int k) const { return std::exp(-double(k)) * double(N); }

Scale ScaleLadder::scale(int k) const {
  if (k < 0) throw std::invalid_argument("scale index must be >= 0");
  const double rk = r(k);
  const double d = std::pow(rk, -gamma);
  return {k, rk, (1.0 + d) * rk, (1.0 - d) * rk};
}

nlohmann::json ScaleLadder::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : scales)
    rows.push_back({{"k", s.k}, {"r", s.r}, {"r_plus", s.r_plus}, {"r_minus", s.r_minus}});
  return {{"N", N}, {"gamma", gamma}, {"r_min", r_min}, {"k_max", k_max}, {"scales", rows}};
}

ScaleLadder make_ladder(int N, double gamma, double r_min) {
  if (N < 1) throw std::invalid_argument("make_ladder: N must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("make_ladder: gamma must lie in (0, 1)");
  if (!(r_min >= 1.0)) throw std::invalid_argument("make_ladder: r_min must be >= 1");
  if (double(N) < r_min) throw std::invalid_argument("make_ladder: N below r_min");
  ScaleLadder l;
  l.N = N;
  l.gamma = gamma;
  l.r_min = r_min;
  for (int k = 0; l.r(k) >= r_min; ++k) {
    l.scales.push_back(l.scale(k));
    l.k_max = k;
  }
  return l;
}

const char* to_string(WindowKind k) {
  switch (k) {
    case WindowKind::center: return "center";
    case WindowKind::plus: return "plus";
    case WindowKind::minus: return "minus";
  }
  return "?";
}

nlohmann::json Window::to_json() const {
  return {{"k", k},           {"kind", to_string(kind)},
          {"center_radius", center_radius}, {"half_width", half_width},
          {"radii", radii},   {"nominal_weight", nominal_weight},
          {"weight", weight}, {"fallback", fallback}};
}

Window window(const ScaleLadder& ladder, int k, WindowKind kind) {
  const Scale s = ladder.scale(k);
  Window w;
  w.k = k;
  w.kind = kind;
  w.center_radius = kind == WindowKind::center ? s.r : kind == WindowKind::plus ? s.r_plus : s.r_minus;
  w.half_width = 0.25 * std::pow(s.r, -ladder.gamma) * w.center_radius;
  w.nominal_weight = 1.0 / (0.5 * std::pow(s.r, 1.0 - ladder.gamma));
  const int lo = std::max(1, int(std::ceil(w.center_radius - w.half_width)));
  const int hi = int(std::floor(w.center_radius + w.half_width));
  for (int r = lo; r <= hi; ++r) w.radii.push_back(r);
  if (w.radii.empty()) {
    w.fallback = true;
    w.radii.push_back(std::max(1, int(std::lround(w.center_radius))));
  }
  w.weight = 1.0 / double(w.radii.size());
  return w;
}

const SiteWeights& circle_weights(double R) {
  if (!(R > 0.0)) throw std::invalid_argument("circle_weights: R must be positive");
  static std::mutex mu;
  static std::map<long, std::unique_ptr<SiteWeights>> cache;
  const long key = long(std::ceil(R * R - 1e-12));
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  const Domain b = Domain::ball({0, 0}, std::sqrt(double(key)));
  auto w = std::make_unique<SiteWeights>(
      elliptic::harmonic_measure(b, {0, 0}, elliptic::HarmonicMethod::row));
  w->normalize();
  return *cache.emplace(key, std::move(w)).first->second;
}

double circle_average(const FieldConfig& f, Vertex v, double R, Extension ext) {
  const SiteWeights& w = circle_weights(R);
  double s = 0.0;
  for (std::size_t i = 0; i < w.sites.size(); ++i)
    s += w.weights[i] * lattice::value_at(f, w.sites[i] + v, ext);
  return s;
}

SiteWeights window_weights(const Window& w) {
  SiteWeights out;
  for (int r : w.radii) {
    const SiteWeights& c = circle_weights(double(r));
    for (std::size_t i = 0; i < c.sites.size(); ++i) {
      out.sites.push_back(c.sites[i]);
      out.weights.push_back(w.weight * c.weights[i]);
    }
  }
  out.normalize();
  return out;
}

XProcess::XProcess(const ScaleLadder& ladder, int k, const Domain& d, Vertex v, Extension ext)
    : k_(k) {
  windows_ = {window(ladder, k, WindowKind::center), window(ladder, k, WindowKind::plus),
              window(ladder, k, WindowKind::minus), window(ladder, k + 1, WindowKind::center)};
  for (const Window& w : windows_) {
    weights_.push_back(window_weights(w).translated(v));
    compiled_.push_back(lattice::compile(weights_.back(), d, ext));
  }
}

bool XProcess::any_fallback() const {
  return std::any_of(windows_.begin(), windows_.end(), [](const Window& w) { return w.fallback; });
}

HarmonicAverageSample XProcess::operator()(const FieldConfig& f) const {
  HarmonicAverageSample s;
  s.k = k_;
  s.X = compiled_[0].apply(f.values);
  s.X_plus = compiled_[1].apply(f.values);
  s.X_minus = compiled_[2].apply(f.values);
  s.X_next = compiled_[3].apply(f.values);
  s.A = s.X_next - s.X_minus;
  s.E = s.X - s.X_minus;
  return s;
}

HarmonicAverageSample x_process(const FieldConfig& f, Vertex v, int k, const ScaleLadder& ladder,
                                Extension ext) {
  return XProcess(ladder, k, *f.domain, v, ext)(f);
}

nlohmann::json AnnulusWeights::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < weights.sites.size(); ++i)
    rows.push_back({weights.sites[i].x, weights.sites[i].y, weights.weights[i]});
  return {{"center", {center.x, center.y}}, {"k", k},
          {"positive_mass", positive_mass}, {"negative_mass", negative_mass},
          {"weights", rows}};
}

AnnulusWeights rho_weights(Vertex v, int k, const ScaleLadder& ladder) {
  const SiteWeights inner = window_weights(window(ladder, k + 1, WindowKind::center));
  const SiteWeights outer = window_weights(window(ladder, k, WindowKind::minus));
  AnnulusWeights a;
  a.center = v;
  a.k = k;
  a.weights = lattice::combine(inner, 1.0, outer, -1.0).translated(v);
  for (double w : a.weights.weights) (w > 0.0 ? a.positive_mass : a.negative_mass) += std::abs(w);
  return a;
}

nlohmann::json AnnihilationReport::to_json() const {
  return {{"trials", trials},
          {"constant_residual", constant_residual},
          {"linear_residual", linear_residual},
          {"max_residual", max_residual},
          {"tolerance", tolerance},
          {"pass", pass()}};
}

AnnihilationReport check_harmonic_annihilation(const AnnulusWeights& rho, const ScaleLadder& ladder,
                                               int trials, std::uint64_t seed) {
  const Domain d = Domain::ball(rho.center, ladder.r(rho.k));
  const auto c = lattice::compile(rho.weights, d, Extension::strict);
  const double l1 = rho.weights.l1();
  elliptic::SolveOptions opt;
  opt.tol = elliptic::kTightTol;

  AnnihilationReport rep;
  rep.trials = trials;
  std::vector<double> g(d.box_size(), 0.0);
  for (std::size_t b : d.boundary()) g[b] = 1.0;
  rep.constant_residual = std::abs(c.apply(elliptic::harmonic_extension(d, g, opt)));

  for (int axis = 0; axis < 2; ++axis) {
    // Linear functions are discrete harmonic, so use them directly.
    std::vector<double> h(d.box_size(), 0.0);
    double hmax = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (!d.in_closure(d.vertex(i))) continue;
      const Vertex y = d.vertex(i) - rho.center;
      h[i] = axis == 0 ? y.x : y.y;
      hmax = std::max(hmax, std::abs(h[i]));
    }
    rep.linear_residual = std::max(rep.linear_residual, std::abs(c.apply(h)) / (l1 * hmax));
  }

  stats::Rng rng = stats::make_rng(seed, 0);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t b : d.boundary()) g[b] = U(rng);
    const auto h = elliptic::harmonic_extension(d, g, opt);
    double hmax = 0.0;
    for (double x : h) hmax = std::max(hmax, std::abs(x));
    rep.max_residual = std::max(rep.max_residual, std::abs(c.apply(h)) / (l1 * hmax));
  }
  return rep;
}

nlohmann::json CouplingReport::to_json() const {
  return {{"k", k},           {"radius", radius}, {"max_abs_f", max_abs_f},
          {"hypothesis_bound", hypothesis_bound}, {"n", n},
          {"mean_f", mean_f}, {"mean_0", mean_0}, {"var_f", var_f},
          {"var_0", var_0},   {"ks", ks},         {"p_value", p_value}};
}

CouplingReport coupling_probe(const ScaleLadder& ladder, int k, Vertex v,
                              const std::function<double(Vertex)>& f,
                              const potential::Potential& p, const CouplingOptions& opt) {
  CouplingReport rep;
  rep.k = k;
  rep.radius = ladder.r(k);
  rep.hypothesis_bound = 2.0 * std::pow(std::log(rep.radius), 2);
  auto d = std::make_shared<const Domain>(Domain::ball(v, rep.radius));
  const auto bc_f = sampler::BoundaryCondition::from_function(*d, f);
  rep.max_abs_f = bc_f.max_abs();
  if (rep.max_abs_f > rep.hypothesis_bound)
    throw std::invalid_argument("coupling_probe: max |f| exceeds 2 (log r_k)^2");

  /// Only A_k is needed; X at r_k and r_{k,+} reach past the ball.
  const auto rho = lattice::compile(rho_weights(v, k, ladder).weights, *d, Extension::strict);
  sampler::SamplerOptions so;
  so.n_samples = opt.n_samples;
  so.kind = opt.kind;
  so.threads = opt.threads;
  so.keep_configs = false;
  so.observables = {[&rho](const FieldConfig& c) { return rho.apply(c.values); }};
  so.observable_names = {"A_k"};
  auto draw = [&](const sampler::BoundaryCondition& bc, std::uint64_t seed) {
    so.seed = seed;
    return p.kind() == potential::Potential::Kind::quadratic
               ? sampler::exact_gaussian_sample(d, bc, so)
               : sampler::sample_batch(d, bc, p, so);
  };
  const auto bf = draw(bc_f, opt.seed);
  const auto b0 = draw(sampler::BoundaryCondition::zero(*d), opt.seed + 0x9e3779b97f4a7c15ULL);
  const auto& af = bf.series[1];
  const auto& a0 = b0.series[1];
  rep.n = af.size();
  rep.mean_f = stats::mean(af);
  rep.mean_0 = stats::mean(a0);
  rep.var_f = stats::variance(af);
  rep.var_0 = stats::variance(a0);
  rep.ks = stats::ks_distance(af, a0);

  std::vector<double> pooled(af);
  pooled.insert(pooled.end(), a0.begin(), a0.end());
  stats::Rng rng = stats::make_rng(opt.seed, 0xb007);
  std::uniform_int_distribution<std::size_t> pick(0, pooled.size() - 1);
  int exceed = 0;
  std::vector<double> x(af.size()), y(a0.size());
  for (int b = 0; b < opt.bootstrap; ++b) {
    for (auto& t : x) t = pooled[pick(rng)];
    for (auto& t : y) t = pooled[pick(rng)];
    if (stats::ks_distance(x, y) >= rep.ks) ++exceed;
  }
  rep.p_value = double(1 + exceed) / double(1 + opt.bootstrap);
  return rep;
}

}  // namespace gradlab::multiscale
