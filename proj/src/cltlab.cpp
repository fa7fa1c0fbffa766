#include "gradlab/cltlab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "gradlab/elliptic.hpp"

namespace gradlab::cltlab {

namespace {

double clamp_ess(double ess, std::size_t n) {
  if (!(ess > 0.0) || ess > double(n)) return double(n);
  return ess;
}

double sd(std::span<const double> x) { return x.size() < 2 ? 0.0 : std::sqrt(stats::variance(x)); }

nlohmann::json complex_json(Complex z) { return {z.real(), z.imag()}; }

}  // namespace

const char* to_string(DensityMethod m) { return m == DensityMethod::histogram ? "histogram" : "kde"; }

double CharFnEstimate::max_imag_z() const {
  double z = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (se_im[i] > 0.0) z = std::max(z, std::abs(values[i].imag()) / se_im[i]);
  return z;
}

nlohmann::json CharFnEstimate::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < t.size(); ++i)
    rows.push_back({t[i], values[i].real(), values[i].imag(), se_re[i], se_im[i]});
  return {{"scale", scale}, {"n", n}, {"n_eff", n_eff}, {"columns", {"t", "re", "im", "se_re", "se_im"}},
          {"rows", rows}};
}

CharFnEstimate char_fn(std::span<const double> x, double ess, const std::vector<double>& t_grid,
                       double scale) {
  if (x.empty()) throw std::invalid_argument("char_fn: empty batch");
  CharFnEstimate cf;
  cf.t = t_grid;
  cf.scale = scale;
  cf.n = x.size();
  cf.n_eff = clamp_ess(ess, x.size());
  std::vector<double> c(x.size()), s(x.size());
  for (double t : t_grid) {
    const double ts = t * scale;
    for (std::size_t i = 0; i < x.size(); ++i) {
      c[i] = std::cos(ts * x[i]);
      s[i] = std::sin(ts * x[i]);
    }
    cf.values.emplace_back(stats::mean(c), stats::mean(s));
    cf.se_re.push_back(sd(c) / std::sqrt(cf.n_eff));
    cf.se_im.push_back(sd(s) / std::sqrt(cf.n_eff));
  }
  return cf;
}

CharFnEstimate char_fn(const sampler::SampleBatch& batch, const std::vector<double>& t_grid,
                       Scaling scaling) {
  double scale = 1.0;
  if (scaling == Scaling::sqrt_log_N) {
    const int N = batch.domain->half_width();
    if (N < 2) throw std::invalid_argument("char_fn: sqrt(log N) scaling needs N >= 2");
    scale = 1.0 / std::sqrt(std::log(double(N)));
  }
  return char_fn(batch.series[0], batch.ess.empty() ? 0.0 : batch.ess[0], t_grid, scale);
}

double EmpiricalDensity::integral() const {
  if (grid.empty()) return 0.0;
  if (method == DensityMethod::histogram) {
    double s = 0.0;
    for (double d : density) s += d * width;
    return s;
  }
  double s = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    s += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
  return s;
}

nlohmann::json EmpiricalDensity::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back({grid[i], density[i]});
  return {{"method", to_string(method)}, {"width", width}, {"n", n}, {"columns", {"x", "density"}},
          {"rows", rows}};
}

EmpiricalDensity histogram_density(std::span<const double> x, double bin_width) {
  if (x.empty()) throw std::invalid_argument("histogram_density: empty sample");
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  const double lo = *mn, hi = *mx;
  double w = bin_width;
  if (!(w > 0.0)) {
    std::vector<double> v(x.begin(), x.end());
    const double iqr = stats::quantile(v, 0.75) - stats::quantile(v, 0.25);
    w = 2.0 * iqr * std::pow(double(x.size()), -1.0 / 3.0);
    if (!(w > 0.0)) w = hi > lo ? (hi - lo) / std::sqrt(double(x.size())) : 1.0;
  }
  const std::size_t nb = std::max<std::size_t>(1, std::size_t(std::ceil((hi - lo) / w)));
  EmpiricalDensity d;
  d.method = DensityMethod::histogram;
  d.width = w;
  d.n = x.size();
  d.grid.resize(nb);
  d.density.assign(nb, 0.0);
  for (std::size_t j = 0; j < nb; ++j) d.grid[j] = lo + (double(j) + 0.5) * w;
  for (double v : x) {
    const std::size_t j = std::min(nb - 1, std::size_t((v - lo) / w));
    d.density[j] += 1.0;
  }
  for (double& v : d.density) v /= double(x.size()) * w;
  return d;
}

EmpiricalDensity kde_density(std::span<const double> x, double bandwidth, std::size_t points) {
  if (x.empty()) throw std::invalid_argument("kde_density: empty sample");
  if (points < 2) throw std::invalid_argument("kde_density: need at least two points");
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  double h = bandwidth;
  if (!(h > 0.0)) h = 1.06 * sd(x) * std::pow(double(x.size()), -0.2);
  if (!(h > 0.0)) h = 1.0;
  EmpiricalDensity d;
  d.method = DensityMethod::kde;
  d.width = h;
  d.n = x.size();
  const double lo = v.front() - 6.0 * h, hi = v.back() + 6.0 * h;
  const double norm = 1.0 / (double(x.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t j = 0; j < points; ++j) {
    const double g = lo + (hi - lo) * double(j) / double(points - 1);
    // Kernel mass beyond 9 bandwidths is below 1e-17 of the peak.
    auto a = std::lower_bound(v.begin(), v.end(), g - 9.0 * h);
    auto b = std::upper_bound(v.begin(), v.end(), g + 9.0 * h);
    double s = 0.0;
    for (auto it = a; it != b; ++it) {
      const double u = (g - *it) / h;
      s += std::exp(-0.5 * u * u);
    }
    d.grid.push_back(g);
    d.density.push_back(s * norm);
  }
  return d;
}

double GaussianReference::density(double x) const {
  return std::exp(-0.5 * x * x / g) / std::sqrt(2.0 * std::numbers::pi * g);
}

double GaussianReference::charfn(double t) const { return std::exp(-0.5 * g * t * t); }

nlohmann::json GaussianReference::to_json() const { return {{"g_hat", g}, {"source", source}}; }

GaussianReference fit_reference(const std::vector<int>& N, const std::vector<double>& var,
                                const std::vector<double>& se) {
  if (N.empty() || N.size() != var.size() || (!se.empty() && se.size() != var.size()))
    throw std::invalid_argument("fit_reference: inconsistent inputs");
  GaussianReference r;
  if (N.size() == 1) {
    r.g = var[0] / std::log(double(N[0]));
    r.source = "variance_ratio";
  } else {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < N.size(); ++i) {
      const double w = (se.empty() || !(se[i] > 0.0)) ? 1.0 : 1.0 / (se[i] * se[i]);
      const double xi = std::log(double(N[i]));
      sw += w;
      sx += w * xi;
      sy += w * var[i];
      sxx += w * xi * xi;
      sxy += w * xi * var[i];
    }
    r.g = (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
    r.source = "variance_slope";
  }
  if (!(r.g > 0.0)) throw std::runtime_error("fit_reference: fitted g is not positive");
  return r;
}

nlohmann::json CltGap::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < density.grid.size(); ++i)
    rows.push_back({density.grid[i], density.density[i], reference[i]});
  return {{"sup_gap", sup_gap},
          {"band", {band_lo, band_hi}},
          {"null_q99", null_hi},
          {"method", to_string(density.method)},
          {"width", density.width},
          {"n", density.n},
          {"columns", {"x", "density", "reference"}},
          {"rows", rows}};
}

namespace {

double sup_gap_of(std::span<const double> x, const GaussianReference& ref, DensityMethod m,
                  double width, EmpiricalDensity* keep = nullptr, std::vector<double>* refv = nullptr) {
  EmpiricalDensity d = m == DensityMethod::histogram ? histogram_density(x, width) : kde_density(x, width);
  double gap = 0.0;
  std::vector<double> r;
  for (std::size_t i = 0; i < d.grid.size(); ++i) {
    r.push_back(ref.density(d.grid[i]));
    gap = std::max(gap, std::abs(d.density[i] - r.back()));
  }
  if (keep) *keep = std::move(d);
  if (refv) *refv = std::move(r);
  return gap;
}

}  // namespace

CltGap clt_gap(std::span<const double> x, const GaussianReference& ref, const GapOptions& opt) {
  if (x.size() < 2) throw std::invalid_argument("clt_gap: need at least two samples");
  CltGap out;
  out.sup_gap = sup_gap_of(x, ref, opt.method, 0.0, &out.density, &out.reference);
  const double width = out.density.width;
  if (opt.bootstrap > 0) {
    stats::Rng rng = stats::make_rng(opt.seed, 0xc17);
    std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
    std::normal_distribution<double> normal(0.0, std::sqrt(ref.g));
    std::vector<double> boot, null, y(x.size());
    for (int b = 0; b < opt.bootstrap; ++b) {
      for (auto& v : y) v = x[pick(rng)];
      boot.push_back(sup_gap_of(y, ref, opt.method, width));
    }
    for (int b = 0; b < opt.bootstrap; ++b) {
      for (auto& v : y) v = normal(rng);
      null.push_back(sup_gap_of(y, ref, opt.method, 0.0));
    }
    out.band_lo = stats::quantile(boot, 0.025);
    out.band_hi = stats::quantile(boot, 0.975);
    out.null_hi = stats::quantile(null, 0.99);
  }
  return out;
}

nlohmann::json RegimeSplit::to_json() const {
  return {{"a", a},
          {"eps", eps},
          {"cut", cut},
          {"I_small", I_small},
          {"I_mid", I_mid},
          {"I_large", I_large},
          {"quad_err", {quad_err[0], quad_err[1], quad_err[2]}},
          {"mc_err", {mc_err[0], mc_err[1], mc_err[2]}}};
}

namespace {

/// Trapezoid of y over [lo, hi] using the grid points inside and linear
/// interpolation at the ends. Also returns the coarse (every other point)
/// trapezoid for a Richardson error estimate.
std::pair<double, double> trapezoid(const std::vector<double>& t, const std::vector<double>& y,
                                    double lo, double hi) {
  lo = std::max(lo, t.front());
  hi = std::min(hi, t.back());
  if (!(hi > lo)) return {0.0, 0.0};
  auto interp = [&](double s) {
    auto it = std::upper_bound(t.begin(), t.end(), s);
    if (it == t.end()) return y.back();
    if (it == t.begin()) return y.front();
    const std::size_t j = std::size_t(it - t.begin());
    const double w = (s - t[j - 1]) / (t[j] - t[j - 1]);
    return (1.0 - w) * y[j - 1] + w * y[j];
  };
  std::vector<double> xs{lo}, ys{interp(lo)};
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] > lo && t[i] < hi) {
      xs.push_back(t[i]);
      ys.push_back(y[i]);
    }
  xs.push_back(hi);
  ys.push_back(interp(hi));
  double fine = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) fine += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
  double coarse = 0.0;
  std::size_t prev = 0;
  for (std::size_t i = 2; i < xs.size(); i += 2) {
    coarse += 0.5 * (ys[i] + ys[prev]) * (xs[i] - xs[prev]);
    prev = i;
  }
  if (prev != xs.size() - 1) coarse += 0.5 * (ys.back() + ys[prev]) * (xs.back() - xs[prev]);
  return {fine, coarse};
}

}  // namespace

RegimeSplit regime_split(const CharFnEstimate& cf, const GaussianReference& ref, double a, double eps,
                         double log_N) {
  if (!(a >= 0.0) || !(eps > 0.0) || !(log_N > 0.0))
    throw std::invalid_argument("regime_split: invalid parameters");
  RegimeSplit r;
  r.a = a;
  r.eps = eps;
  r.cut = eps * std::sqrt(log_N);
  if (a > r.cut) throw std::invalid_argument("regime_split: a exceeds eps sqrt(log N)");
  std::vector<double> t, dev, mod, err;
  for (std::size_t i = 0; i < cf.t.size(); ++i) {
    if (cf.t[i] < 0.0) continue;
    t.push_back(cf.t[i]);
    dev.push_back(std::abs(cf.values[i] - Complex(ref.charfn(cf.t[i]), 0.0)));
    mod.push_back(std::abs(cf.values[i]));
    err.push_back(std::hypot(cf.se_re[i], cf.se_im[i]));
  }
  if (t.size() < 2 || !std::is_sorted(t.begin(), t.end()))
    throw std::invalid_argument("regime_split: need an increasing grid with t >= 0");
  const double bounds[4] = {0.0, a, r.cut, t.back()};
  double* I[3] = {&r.I_small, &r.I_mid, &r.I_large};
  for (int part = 0; part < 3; ++part) {
    const auto& y = part < 2 ? dev : mod;
    const auto [fine, coarse] = trapezoid(t, y, bounds[part], bounds[part + 1]);
    // Both signs of t contribute equally (|Psi(-t)| = |Psi(t)|).
    *I[part] = 2.0 * fine;
    r.quad_err[part] = 2.0 * std::abs(fine - coarse) / 3.0;
    r.mc_err[part] = 2.0 * trapezoid(t, err, bounds[part], bounds[part + 1]).first;
  }
  return r;
}

nlohmann::json FactorReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : points)
    rows.push_back({{"s", p.s},
                    {"lhs", complex_json(p.lhs)},
                    {"outer", complex_json(p.outer)},
                    {"inner", complex_json(p.inner)},
                    {"rhs", complex_json(p.rhs)},
                    {"diff_re", p.diff_re},
                    {"diff_im", p.diff_im},
                    {"se", p.se},
                    {"gaussian_diff", p.gaussian_diff},
                    {"z", p.z}});
  return {{"N", N},
          {"k", k},
          {"gaussian_variances", {{"lhs", var_lhs_gauss}, {"outer", var_outer_gauss}, {"inner", var_inner_gauss}}},
          {"points", rows}};
}

namespace {

struct FactorGeometry {
  multiscale::ScaleLadder ladder;
  lattice::DomainPtr square;
  lattice::DomainPtr ball;
  std::unique_ptr<multiscale::XProcess> xk, xk1, xa;
};

FactorGeometry factor_geometry(int N, int k, double gamma, double r_min) {
  FactorGeometry g;
  g.ladder = multiscale::make_ladder(N, gamma, r_min);
  if (k < 1 || k > g.ladder.k_max) throw std::invalid_argument("factorization: k outside [1, k_max]");
  g.square = std::make_shared<const lattice::Domain>(lattice::build_square(N));
  g.ball = std::make_shared<const lattice::Domain>(lattice::Domain::ball({0, 0}, g.ladder.r(k - 1)));
  const auto zero = lattice::Extension::zero;
  g.xk = std::make_unique<multiscale::XProcess>(g.ladder, k, *g.square, Vertex{0, 0}, zero);
  g.xk1 = std::make_unique<multiscale::XProcess>(g.ladder, k - 1, *g.square, Vertex{0, 0}, zero);
  g.xa = std::make_unique<multiscale::XProcess>(g.ladder, k - 1, *g.ball, Vertex{0, 0}, zero);
  return g;
}

GaussianFactorVariances variances_of(const FactorGeometry& g) {
  elliptic::SolveOptions opt;
  opt.tol = elliptic::kTightTol;
  const auto zero = lattice::Extension::zero;
  GaussianFactorVariances v;
  v.lhs = elliptic::quadratic_form(*g.square, lattice::to_box(g.xk->weights()[0], *g.square, zero), opt);
  v.outer = elliptic::quadratic_form(*g.square, lattice::to_box(g.xk1->weights()[0], *g.square, zero), opt);
  const auto rho = lattice::combine(g.xa->weights()[3], 1.0, g.xa->weights()[2], -1.0);
  v.inner = elliptic::quadratic_form(*g.ball, lattice::to_box(rho, *g.ball, zero), opt);
  return v;
}

}  // namespace

GaussianFactorVariances gaussian_factor_variances(int N, int k, double gamma, double r_min) {
  return variances_of(factor_geometry(N, k, gamma, r_min));
}

FactorReport factorization_check(const potential::Potential& p, const FactorOptions& opt) {
  for (double s : opt.s_grid)
    if (!(s * s < 0.5)) throw std::invalid_argument("factorization_check: requires s^2 < 1/2");
  const FactorGeometry g = factor_geometry(opt.N, opt.k, opt.gamma, opt.r_min);
  const GaussianFactorVariances gv = variances_of(g);
  FactorReport rep;
  rep.N = opt.N;
  rep.k = opt.k;
  rep.var_lhs_gauss = gv.lhs;
  rep.var_outer_gauss = gv.outer;
  rep.var_inner_gauss = gv.inner;

  const bool exact = p.kind() == potential::Potential::Kind::quadratic;
  auto run = [&](lattice::DomainPtr d, std::size_t n, std::uint64_t seed,
                 std::vector<sampler::Observable> obs) {
    sampler::SamplerOptions so;
    so.n_samples = n;
    so.seed = seed;
    so.kind = opt.kind;
    so.threads = opt.threads;
    so.keep_configs = false;
    so.observables = std::move(obs);
    const auto bc = sampler::BoundaryCondition::zero(*d);
    return exact ? sampler::exact_gaussian_sample(d, bc, so) : sampler::sample_batch(d, bc, p, so);
  };
  const auto outer = run(g.square, opt.samples, opt.seed,
                         {[&](const lattice::FieldConfig& c) { return (*g.xk)(c).X; },
                          [&](const lattice::FieldConfig& c) { return (*g.xk1)(c).X; }});
  const auto inner = run(g.ball, opt.inner_samples, opt.seed + 0x51ed,
                         {[&](const lattice::FieldConfig& c) { return (*g.xa)(c).A; }});
  const auto& Xk = outer.series[1];
  const auto& Xk1 = outer.series[2];
  const auto& A = inner.series[1];
  const double ess_o = clamp_ess(std::min(outer.ess[1], outer.ess[2]), Xk.size());
  const double ess_i = clamp_ess(inner.ess[1], A.size());

  for (double s : opt.s_grid) {
    FactorPoint fp;
    fp.s = s;
    Complex L{0, 0}, O{0, 0}, I{0, 0};
    for (std::size_t i = 0; i < Xk.size(); ++i) {
      L += std::polar(1.0, s * Xk[i]);
      O += std::polar(1.0, s * Xk1[i]);
    }
    for (double a : A) I += std::polar(1.0, s * a);
    L /= double(Xk.size());
    O /= double(Xk.size());
    I /= double(A.size());
    fp.lhs = L;
    fp.outer = O;
    fp.inner = I;
    fp.rhs = O * I;
    fp.diff_re = (L - fp.rhs).real();
    fp.diff_im = (L - fp.rhs).imag();
    std::vector<double> d1(Xk.size()), d2(A.size());
    for (std::size_t i = 0; i < Xk.size(); ++i)
      d1[i] = (std::polar(1.0, s * Xk[i]) - std::polar(1.0, s * Xk1[i]) * I).real();
    for (std::size_t j = 0; j < A.size(); ++j) d2[j] = (O * std::polar(1.0, s * A[j])).real();
    fp.se = std::sqrt(stats::variance(d1) / ess_o + stats::variance(d2) / ess_i);
    fp.gaussian_diff = std::exp(-0.5 * s * s * gv.lhs) - std::exp(-0.5 * s * s * (gv.outer + gv.inner));
    fp.z = fp.se > 0.0 ? (fp.diff_re - fp.gaussian_diff) / fp.se : 0.0;
    rep.points.push_back(fp);
  }
  return rep;
}

nlohmann::json MwReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : points) rows.push_back({p.s, p.modulus, p.se, p.root});
  return {{"log_N", log_N}, {"s_min", s_min}, {"eps1", eps1}, {"C", C},
          {"columns", {"s", "modulus", "se", "root"}}, {"rows", rows}};
}

MwReport mw_char_probe(std::span<const double> phi0, double ess, double log_N,
                       const std::vector<double>& s_grid, double s_min) {
  if (phi0.empty()) throw std::invalid_argument("mw_char_probe: empty batch");
  if (!(log_N > 0.0)) throw std::invalid_argument("mw_char_probe: log N must be positive");
  const CharFnEstimate cf = char_fn(phi0, ess, s_grid, 1.0);
  MwReport r;
  r.log_N = log_N;
  r.s_min = s_min;
  double max_root = 0.0, max_c = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    MwPoint p;
    p.s = s_grid[i];
    p.modulus = std::abs(cf.values[i]);
    p.se = std::hypot(cf.se_re[i], cf.se_im[i]);
    p.root = std::pow(std::max(0.0, p.modulus - 3.0 * p.se), 1.0 / log_N);
    if (std::abs(p.s) >= s_min) {
      any = true;
      max_root = std::max(max_root, p.root);
      max_c = std::max(max_c, p.s * p.s * p.root);
    }
    r.points.push_back(p);
  }
  if (any) {
    r.eps1 = 1.0 - max_root;
    r.C = max_c;
  }
  return r;
}

bool BlExpReport::any_violation() const {
  return std::any_of(points.begin(), points.end(), [](const auto& p) { return p.violation; });
}

nlohmann::json BlExpReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : points) rows.push_back({p.t, p.log_mgf, p.se, p.bound, p.violation, p.dropped});
  return {{"fGf", quadratic}, {"lambda", lambda}, {"any_violation", any_violation()},
          {"columns", {"t", "log_mgf", "se", "bound", "violation", "dropped"}}, {"rows", rows}};
}

BlExpReport bl_exp_probe(std::span<const double> x, double ess, double fGf,
                         const std::vector<double>& t_grid, double lambda) {
  if (x.empty()) throw std::invalid_argument("bl_exp_probe: empty batch");
  if (!(lambda > 0.0)) throw std::invalid_argument("bl_exp_probe: lambda must be positive");
  const double n_eff = clamp_ess(ess, x.size());
  double xmax = 0.0;
  for (double v : x) xmax = std::max(xmax, std::abs(v));
  BlExpReport r;
  r.quadratic = fGf;
  r.lambda = lambda;
  std::vector<double> e(x.size());
  for (double t : t_grid) {
    BlExpPoint p;
    p.t = t;
    p.bound = t * t / (2.0 * lambda) * fGf;
    if (std::abs(t) * xmax > 700.0) {
      p.dropped = true;
      r.points.push_back(p);
      continue;
    }
    for (std::size_t i = 0; i < x.size(); ++i) e[i] = std::exp(t * x[i]);
    const double m = stats::mean(e);
    p.log_mgf = std::log(m);
    p.se = sd(e) / (std::sqrt(n_eff) * m);
    p.violation = p.log_mgf - 3.0 * p.se > p.bound;
    r.points.push_back(p);
  }
  return r;
}

nlohmann::json TailReport::to_json() const {
  return {{"R", R}, {"count", count}, {"n", n}, {"frequency", frequency}, {"ci", {ci_lo, ci_hi}}};
}

TailReport tail_event_probe(std::span<const double> max_abs, double R) {
  if (!(R > 1.0)) throw std::invalid_argument("tail_event_probe: R must exceed 1");
  TailReport r;
  r.R = R;
  r.n = max_abs.size();
  const double thr = std::pow(std::log(R), 2);
  for (double m : max_abs) r.count += m >= thr ? 1 : 0;
  r.frequency = r.n ? double(r.count) / double(r.n) : 0.0;
  std::tie(r.ci_lo, r.ci_hi) = stats::wilson_interval(r.count, r.n);
  return r;
}

TailReport tail_event_probe(const sampler::SampleBatch& batch, double R) {
  std::vector<double> m;
  for (const auto& c : batch.configs) m.push_back(sampler::max_abs_field(c));
  return tail_event_probe(m, R);
}

}  // namespace gradlab::cltlab
