#include "gradlab/mermin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "gradlab/elliptic.hpp"

namespace gradlab::mermin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void normalize(std::vector<double>& v) {
  double mass = 0.0;
  for (double x : v) mass += x;
  mass *= kTwoPi / double(v.size());
  if (!(mass > 0.0) || !std::isfinite(mass)) throw std::invalid_argument("circle density has no mass");
  for (double& x : v) x /= mass;
}

}  // namespace

double CircleDensity::spacing() const { return kTwoPi / double(values.size()); }

double CircleDensity::at(long j) const {
  const long M = long(values.size());
  j %= M;
  if (j < 0) j += M;
  return values[std::size_t(j)];
}

CircleDensity CircleDensity::uniform(std::size_t M) {
  if (M < 2) throw std::invalid_argument("circle grid needs at least 2 points");
  return {std::vector<double>(M, 1.0 / kTwoPi)};
}

CircleDensity CircleDensity::wrapped_gaussian(double mu, double kappa, std::size_t M) {
  if (!(kappa > 0.0)) throw std::invalid_argument("wrapped_gaussian: kappa must be positive");
  if (M < 2) throw std::invalid_argument("circle grid needs at least 2 points");
  CircleDensity f;
  f.values.resize(M);
  const double h = kTwoPi / double(M);
  if (kappa < 1.0) {
    /// Fourier series: coefficients exp(-n^2 / (2 kappa)).
    std::vector<double> coef;
    for (int n = 1;; ++n) {
      const double c = std::exp(-double(n) * n / (2.0 * kappa));
      if (c < 1e-18) break;
      coef.push_back(c);
    }
    for (std::size_t j = 0; j < M; ++j) {
      const double x = double(j) * h - mu;
      double s = 1.0;
      for (std::size_t n = 0; n < coef.size(); ++n) s += 2.0 * coef[n] * std::cos(double(n + 1) * x);
      f.values[j] = s / kTwoPi;
    }
  } else {
    const int wraps = int(std::ceil(9.0 / (kTwoPi * std::sqrt(kappa)))) + 2;
    const double norm = std::sqrt(kappa / kTwoPi);
    for (std::size_t j = 0; j < M; ++j) {
      double x = std::remainder(double(j) * h - mu, kTwoPi);
      double s = 0.0;
      for (int n = -wraps; n <= wraps; ++n) {
        const double d = x + kTwoPi * n;
        s += std::exp(-0.5 * kappa * d * d);
      }
      f.values[j] = norm * s;
    }
  }
  normalize(f.values);
  return f;
}

CircleDensity CircleDensity::from_function(const std::function<double(double)>& fn, std::size_t M) {
  if (M < 2) throw std::invalid_argument("circle grid needs at least 2 points");
  CircleDensity f;
  f.values.resize(M);
  for (std::size_t j = 0; j < M; ++j) {
    const double v = fn(double(j) * kTwoPi / double(M));
    if (!(v >= 0.0)) throw std::invalid_argument("circle density must be nonnegative");
    f.values[j] = v;
  }
  normalize(f.values);
  return f;
}

double tau_value(int k, double b, Vertex x) {
  const double r = std::abs(x.x) + std::abs(x.y);
  const double outer = std::ldexp(1.0, k);
  if (r <= 0.5 * outer) return b;
  if (r < outer) return b * (1.0 - r / outer);
  return 0.0;
}

nlohmann::json DeformationProfile::to_json() const {
  return {{"k", k}, {"b", b}, {"energy_undirected", energy_undirected}, {"energy_both", energy_both},
          {"energy_ratio", energy_ratio()}};
}

DeformationProfile make_tau(int k, double b, const Domain& d) {
  if (k < 0) throw std::invalid_argument("make_tau: k must be >= 0");
  if (d.kind() == lattice::DomainKind::square && std::ldexp(1.0, k) > double(d.half_width()))
    throw std::invalid_argument("make_tau: diamond escapes domain (2^k > N)");
  const int reach = 1 << k;
  for (int x = -reach; x <= reach; ++x)
    for (int y = -reach; y <= reach; ++y) {
      const Vertex v{x, y};
      if (tau_value(k, 1.0, v) != 0.0 && !d.in_closure(v))
        throw std::invalid_argument("make_tau: diamond escapes domain");
    }
  DeformationProfile t;
  t.k = k;
  t.b = b;
  t.values.assign(d.box_size(), 0.0);
  for (std::size_t i = 0; i < d.box_size(); ++i)
    if (d.site(i) != lattice::SiteKind::outside) t.values[i] = tau_value(k, b, d.vertex(i));
  for (const Edge& e : d.energy_edges()) {
    const double g = t.values[d.index(e.head)] - t.values[d.index(e.tail)];
    t.energy_undirected += g * g;
  }
  t.energy_both = 2.0 * t.energy_undirected;
  return t;
}

nlohmann::json PerturbationReport::to_json() const {
  return {{"dimension", dimension},
          {"grid_points", grid_points},
          {"n_per_axis", n_per_axis},
          {"C_used", C_used},
          {"exponent", exponent},
          {"min_log_ratio", min_log_ratio},
          {"max_abs_log_ratio", max_abs_log_ratio},
          {"worst_ratio", worst_ratio},
          {"violations", violations},
          {"holds", holds()}};
}

PerturbationReport density_perturbation_check(const potential::Potential& p, const Domain& d,
                                              const std::vector<double>& tau, double b,
                                              int n_per_axis) {
  const auto& interior = d.interior();
  const std::size_t dim = interior.size();
  if (dim > 6) throw std::invalid_argument("density_perturbation_check: at most 6 interior vertices");
  if (tau.size() != d.box_size()) throw std::invalid_argument("density_perturbation_check: tau not box-sized");
  if (n_per_axis < 2) throw std::invalid_argument("density_perturbation_check: n_per_axis must be >= 2");
  const double total = std::pow(double(n_per_axis), double(dim));
  if (total > 2e7) throw std::invalid_argument("density_perturbation_check: grid too large");

  struct EdgeIdx {
    std::size_t t, h;
    double dtau;
  };
  std::vector<EdgeIdx> edges;
  double energy = 0.0;
  for (const Edge& e : d.energy_edges()) {
    const std::size_t t = d.index(e.tail), h = d.index(e.head);
    edges.push_back({t, h, tau[h] - tau[t]});
    energy += edges.back().dtau * edges.back().dtau;
  }

  PerturbationReport r;
  r.dimension = dim;
  r.n_per_axis = n_per_axis;
  r.grid_points = std::size_t(total);
  /// Half of sup V'' times the energy over both orientations.
  const double exponent = 0.5 * p.Lambda() * 2.0 * energy;
  r.exponent = exponent;
  r.C_used = b != 0.0 ? exponent / (b * b) : 0.0;

  std::vector<double> sd(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const auto col = elliptic::green_column(d, d.vertex(interior[i]), {.tol = elliptic::kTightTol});
    sd[i] = std::sqrt(col[interior[i]] / p.lambda());
  }

  std::vector<double> phi(d.box_size(), 0.0);
  std::vector<int> idx(dim, 0);
  r.min_log_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t count = 0; count < r.grid_points; ++count) {
    for (std::size_t i = 0; i < dim; ++i)
      phi[interior[i]] = sd[i] * (-8.0 + 16.0 * double(idx[i]) / double(n_per_axis - 1));
    double log_ratio = exponent, scale = exponent;
    for (const EdgeIdx& e : edges) {
      const double u = phi[e.h] - phi[e.t];
      const double v0 = p.value(u), vp = p.value(u + e.dtau), vm = p.value(u - e.dtau);
      log_ratio += 2.0 * v0 - vp - vm;
      scale += 2.0 * std::abs(v0) + std::abs(vp) + std::abs(vm);
    }
    r.min_log_ratio = std::min(r.min_log_ratio, log_ratio);
    r.max_abs_log_ratio = std::max(r.max_abs_log_ratio, std::abs(log_ratio));
    if (log_ratio < -1e-12 * (1.0 + scale)) ++r.violations;
    for (std::size_t i = 0; i < dim; ++i) {
      if (++idx[i] < n_per_axis) break;
      idx[i] = 0;
    }
  }
  r.worst_ratio = std::exp(r.min_log_ratio);
  return r;
}

nlohmann::json RatioCheck::to_json() const {
  return {{"t", t}, {"C", C}, {"worst_deficit", worst_deficit}, {"worst_a", worst_a},
          {"worst_b", worst_b}, {"tolerance", tolerance}, {"pass", pass()}};
}

RatioCheck check_ratio_condition(const CircleDensity& f, double t, double C) {
  const std::size_t M = f.size();
  if (M < 512) throw std::invalid_argument("check_ratio_condition: grid coarser than pi/256");
  const double h = f.spacing();
  std::vector<double> lf(M);
  for (std::size_t j = 0; j < M; ++j) lf[j] = std::log(f.values[j]);
  std::vector<double> pen(M);
  for (std::size_t j = 0; j < M; ++j) {
    const double b = double(j) * h;
    pen[j] = C * b * b / (t * t);
  }
  RatioCheck r;
  r.t = t;
  r.C = C;
  r.worst_deficit = 0.0;
  for (std::size_t a = 0; a < M; ++a) {
    if (!(f.values[a] > 0.0)) continue;
    for (std::size_t j = 1; j < M; ++j) {
      const double lp = lf[(a + j) % M], lm = lf[(a + M - j) % M];
      const double deficit = 1.0 - std::exp(lp + lm - 2.0 * lf[a] + pen[j]);
      if (deficit > r.worst_deficit) {
        r.worst_deficit = deficit;
        r.worst_a = double(a) * h;
        r.worst_b = double(j) * h;
      }
    }
  }
  return r;
}

CharIntegral char_integral(const CircleDensity& f) {
  const std::size_t M = f.size();
  if (M % 2 != 0) throw std::invalid_argument("char_integral: grid size must be even");
  const double h = f.spacing();
  std::complex<double> full = 0.0, half = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    const std::complex<double> term = std::polar(f.values[j], double(j) * h);
    full += term;
    if (j % 2 == 0) half += term;
  }
  full *= h;
  half *= 2.0 * h;
  return {full, std::abs(full - half)};
}

nlohmann::json CertifiedBound::to_json() const {
  return {{"t", t},
          {"C", C},
          {"m", m},
          {"bound", bound},
          {"discretization", discretization},
          {"rigorous", rigorous},
          {"data_bound", data_bound},
          {"arc_ratio", arc_ratio},
          {"arc_factor", arc_factor},
          {"arc_factor_rigorous", arc_factor_rigorous},
          {"integral_abs", integral_abs},
          {"quad_error", quad_error},
          {"holds", holds}};
}

CertifiedBound certified_bound(const CircleDensity& f, double t, double C, int m) {
  if (!(C > 0.0) || t == 0.0) throw std::invalid_argument("certified_bound: need C > 0 and t != 0");
  if (m < 1 || double(m) < t * t / C) throw std::invalid_argument("certified_bound: m must be >= t^2 / C");
  const RatioCheck rc = check_ratio_condition(f, t, C);
  if (!rc.pass()) throw std::invalid_argument("certified_bound: ratio condition fails");

  CertifiedBound cb;
  cb.t = t;
  cb.C = C;
  cb.m = m;
  const double x = C / (t * t);
  cb.discretization = std::numbers::pi / (2.0 * m);
  cb.bound = 1.0 - std::exp(-2.0 * x) + cb.discretization;
  cb.rigorous = std::tanh(x * std::numbers::pi * std::numbers::pi / 4.0) + cb.discretization;
  cb.arc_factor = std::exp(2.0 * x);
  cb.arc_factor_rigorous = std::exp(x * std::numbers::pi * std::numbers::pi / 2.0);

  /// Arc masses from the piecewise-constant density with cell j centred at
  /// angle j h.
  const std::size_t M = f.size();
  const double h = f.spacing();
  const double arc = std::numbers::pi / m;
  cb.arc_mass.assign(std::size_t(2 * m), 0.0);
  for (std::size_t j = 0; j < M; ++j) {
    for (double shift : {0.0, kTwoPi}) {
      double lo = double(j) * h - 0.5 * h + shift, hi = lo + h;
      lo = std::max(lo, 0.0);
      hi = std::min(hi, kTwoPi);
      if (hi <= lo) continue;
      long k0 = std::clamp(long(std::floor(lo / arc)), 0L, long(2 * m - 1));
      for (long k = k0; k < 2 * m; ++k) {
        const double a0 = std::max(lo, k * arc), a1 = std::min(hi, (k + 1) * arc);
        if (a1 <= a0) break;
        cb.arc_mass[std::size_t(k)] += (a1 - a0) * f.values[j];
      }
    }
  }
  double data = 0.0;
  for (int k = 0; k < m; ++k) data += std::abs(cb.arc_mass[std::size_t(k)] - cb.arc_mass[std::size_t(k + m)]);
  cb.data_bound = data + cb.discretization;
  const auto [mn, mx] = std::minmax_element(cb.arc_mass.begin(), cb.arc_mass.end());
  cb.arc_ratio = *mn > 0.0 ? *mx / *mn : std::numeric_limits<double>::infinity();

  const CharIntegral ci = char_integral(f);
  cb.integral_abs = std::abs(ci.value);
  cb.quad_error = ci.quad_error;
  cb.holds = cb.integral_abs <= cb.bound + cb.quad_error;
  return cb;
}

std::vector<SweepRow> wrapped_gaussian_sweep(const std::vector<double>& t_grid, double C, int m,
                                             std::size_t M) {
  std::vector<SweepRow> rows;
  for (double t : t_grid) {
    SweepRow row;
    row.t = t;
    row.kappa = C / (t * t);
    const CircleDensity f = CircleDensity::wrapped_gaussian(0.0, row.kappa, M);
    row.integral = std::abs(char_integral(f).value);
    const int m_used = std::max(m, int(std::ceil(t * t / C)));
    row.bound = certified_bound(f, t, C, m_used);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace gradlab::mermin
