#include "gradlab/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gradlab/stats.hpp"

namespace gradlab::elliptic {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double conductance(const Domain& d, const Conductance* a, std::size_t i, int dir) {
  if (a == nullptr || a->empty()) return 1.0;
  switch (dir) {
    case 0: return a->cx[i];
    case 1: return a->cx[i - std::size_t(d.ny())];
    case 2: return a->cy[i];
    default: return a->cy[i - 1];
  }
}

struct Stencil {
  std::vector<double> coef;  // 4 per interior site
  std::vector<double> diag;
};

Stencil make_stencil(const Domain& d, const Conductance* a) {
  if (a != nullptr && !a->empty() &&
      (a->cx.size() != d.box_size() || a->cy.size() != d.box_size()))
    throw std::invalid_argument("conductance size does not match the domain box");
  const auto& interior = d.interior();
  Stencil s;
  s.coef.resize(4 * interior.size());
  s.diag.assign(interior.size(), 0.0);
  for (std::size_t k = 0; k < interior.size(); ++k)
    for (int dir = 0; dir < 4; ++dir) {
      const double c = conductance(d, a, interior[k], dir);
      if (!(c > 0.0)) throw std::invalid_argument("conductances must be positive");
      s.coef[4 * k + dir] = c;
      s.diag[k] += c;
    }
  return s;
}

void apply_compressed(const Domain& d, const Stencil& s, const std::vector<double>& x,
                      std::vector<double>& y) {
  const auto& nbr = d.interior_neighbours();
  const std::size_t n = x.size();
  for (std::size_t k = 0; k < n; ++k) {
    double acc = s.diag[k] * x[k];
    for (int dir = 0; dir < 4; ++dir) {
      const long j = nbr[4 * k + dir];
      if (j >= 0) acc -= s.coef[4 * k + dir] * x[std::size_t(j)];
    }
    y[k] = acc;
  }
}

}  // namespace

long pcg(const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
         const std::vector<double>& diag, const std::vector<double>& b, std::vector<double>& x,
         const SolveOptions& opt, double* residual) {
  const std::size_t n = b.size();
  if (x.size() != n) x.assign(n, 0.0);
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    if (residual) *residual = 0.0;
    return 0;
  }
  const long max_iter = opt.max_iter > 0 ? opt.max_iter : 20 * long(n) + 200;
  std::vector<double> r(n), z(n), p(n), q(n);
  long it = 0;
  double rel = 0.0;
  std::vector<double> history;
  // Restart from the true residual so the reported residual is not the
  // recursively updated one.
  for (int restart = 0; restart < 5; ++restart) {
    apply(x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    rel = std::sqrt(dot(r, r)) / bnorm;
    history.push_back(rel);
    if (rel <= opt.tol) break;
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    p = z;
    double rz = dot(r, z);
    while (it < max_iter) {
      apply(p, q);
      const double pq = dot(p, q);
      if (!(pq > 0.0)) break;
      const double alpha = rz / pq;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      ++it;
      if (std::sqrt(dot(r, r)) / bnorm <= 0.5 * opt.tol) break;
      for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (it >= max_iter) {
      apply(x, q);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
      rel = std::sqrt(dot(r, r)) / bnorm;
      history.push_back(rel);
      break;
    }
  }
  if (residual) *residual = rel;
  if (!(rel <= opt.tol)) {
    std::ostringstream msg;
    msg << "conjugate gradient did not converge: iterations " << it << ", residual history";
    for (double h : history) msg << ' ' << h;
    throw std::runtime_error(msg.str());
  }
  return it;
}

SolveResult solve_dirichlet(const Domain& d, std::span<const double> g,
                            std::span<const double> rhs, const Conductance* a,
                            const SolveOptions& opt) {
  if (!g.empty() && g.size() != d.box_size())
    throw std::invalid_argument("boundary data size does not match the domain box");
  if (!rhs.empty() && rhs.size() != d.box_size())
    throw std::invalid_argument("right-hand side size does not match the domain box");
  const auto& interior = d.interior();
  const Stencil s = make_stencil(d, a);
  std::vector<double> b(interior.size(), 0.0);
  for (std::size_t k = 0; k < interior.size(); ++k) {
    const std::size_t i = interior[k];
    if (!rhs.empty()) b[k] = rhs[i];
    if (!g.empty())
      for (int dir = 0; dir < 4; ++dir) {
        const std::size_t j = std::size_t(long(i) + d.offset(dir));
        if (d.site(j) == lattice::SiteKind::boundary) b[k] += s.coef[4 * k + dir] * g[j];
      }
  }
  std::vector<double> x(interior.size(), 0.0);
  SolveResult res;
  res.iterations = pcg([&](const std::vector<double>& in, std::vector<double>& out) {
    apply_compressed(d, s, in, out);
  }, s.diag, b, x, opt, &res.residual);
  res.u.assign(d.box_size(), 0.0);
  if (!g.empty())
    for (std::size_t i : d.boundary()) res.u[i] = g[i];
  for (std::size_t k = 0; k < interior.size(); ++k) res.u[interior[k]] = x[k];
  return res;
}

std::vector<double> apply_operator(const Domain& d, std::span<const double> u,
                                   const Conductance* a) {
  if (u.size() != d.box_size()) throw std::invalid_argument("apply_operator: size mismatch");
  std::vector<double> out(d.box_size(), 0.0);
  for (std::size_t i : d.interior()) {
    double acc = 0.0;
    for (int dir = 0; dir < 4; ++dir) {
      const std::size_t j = std::size_t(long(i) + d.offset(dir));
      acc += conductance(d, a, i, dir) * (u[i] - u[j]);
    }
    out[i] = acc;
  }
  return out;
}

std::vector<double> green_column(const Domain& d, Vertex x, const SolveOptions& opt) {
  if (!d.is_interior(x)) throw std::invalid_argument("green_column: source is not interior");
  std::vector<double> rhs(d.box_size(), 0.0);
  rhs[d.index(x)] = 1.0;
  return solve_dirichlet(d, {}, rhs, nullptr, opt).u;
}

GreenTable green_table(const Domain& d, const std::vector<Vertex>& sources,
                       const SolveOptions& opt) {
  GreenTable t;
  t.sources = sources;
  for (Vertex x : sources) t.columns.push_back(green_column(d, x, opt));
  return t;
}

double quadratic_form(const Domain& d, std::span<const double> rho, const SolveOptions& opt) {
  if (rho.size() != d.box_size()) throw std::invalid_argument("quadratic_form: size mismatch");
  std::vector<double> f(d.box_size(), 0.0);
  for (std::size_t i : d.interior()) f[i] = rho[i];
  const auto u = solve_dirichlet(d, {}, f, nullptr, opt).u;
  double s = 0.0;
  for (std::size_t i : d.interior()) s += f[i] * u[i];
  return s;
}

lattice::SiteWeights harmonic_measure(const Domain& d, Vertex v, HarmonicMethod method,
                                      std::size_t threshold, double tol) {
  if (!d.is_interior(v)) throw std::invalid_argument("harmonic_measure: v must be interior");
  if (method == HarmonicMethod::automatic)
    method = d.boundary().size() <= threshold ? HarmonicMethod::indicator : HarmonicMethod::row;
  SolveOptions opt;
  opt.tol = tol;
  lattice::SiteWeights w;
  const std::size_t vi = d.index(v);
  if (method == HarmonicMethod::indicator) {
    std::vector<double> g(d.box_size(), 0.0);
    for (std::size_t b : d.boundary()) {
      g[b] = 1.0;
      const auto u = solve_dirichlet(d, g, {}, nullptr, opt).u;
      g[b] = 0.0;
      w.sites.push_back(d.vertex(b));
      w.weights.push_back(u[vi]);
    }
  } else {
    std::vector<double> rhs(d.box_size(), 0.0);
    rhs[vi] = 1.0;
    const auto G = solve_dirichlet(d, {}, rhs, nullptr, opt).u;
    for (std::size_t b : d.boundary()) {
      double s = 0.0;
      for (int dir = 0; dir < 4; ++dir) {
        const Vertex y = d.vertex(b) + lattice::kNeighbours[dir];
        if (d.is_interior(y)) s += G[d.index(y)];
      }
      w.sites.push_back(d.vertex(b));
      w.weights.push_back(s);
    }
  }
  return w;
}

std::vector<double> harmonic_extension(const Domain& d, std::span<const double> g,
                                       const SolveOptions& opt) {
  return solve_dirichlet(d, g, {}, nullptr, opt).u;
}

double h_minus_one_norm(const Domain& d, std::span<const double> f, const SolveOptions& opt) {
  return std::sqrt(std::max(0.0, quadratic_form(d, f, opt)));
}

double bl_bound_linear(const Domain& d, std::span<const double> rho, double lambda,
                       const SolveOptions& opt) {
  if (!(lambda > 0.0)) throw std::invalid_argument("bl_bound_linear: lambda must be positive");
  return quadratic_form(d, rho, opt) / lambda;
}

Domain cube_domain(const lattice::TriadicCube& q) {
  if (q.level < 1) throw std::invalid_argument("cube_domain: level must be >= 1");
  return Domain::square(q.half_width(), q.center);
}

Domain poincare_domain(int m) {
  if (m < 1) throw std::invalid_argument("poincare_domain: level must be >= 1");
  return Domain::square(lattice::TriadicCube{m, {0, 0}}.half_width() + 1);
}

nlohmann::json PoincareReport::to_json() const {
  return {{"m", m}, {"lhs", lhs}, {"l2_term", l2_term}, {"scale_terms", scale_terms},
          {"rhs", rhs}, {"C", C}};
}

PoincareReport multiscale_poincare_check(std::span<const double> f, int m) {
  const lattice::TriadicCube cube{m, {0, 0}};
  const Domain d = poincare_domain(m);
  if (f.size() != d.box_size()) throw std::invalid_argument("poincare: f has the wrong size");
  const double vol = double(cube.volume());
  PoincareReport r;
  r.m = m;
  r.lhs = h_minus_one_norm(d, f) / std::sqrt(vol);
  double s2 = 0.0;
  for (std::size_t i : d.interior()) s2 += f[i] * f[i];
  r.l2_term = std::sqrt(s2 / vol);
  r.rhs = r.l2_term;
  for (int n = 0; n < m; ++n) {
    const auto cells = lattice::triadic_partition(m, n);
    double acc = 0.0;
    for (const auto& c : cells) {
      const int h = c.half_width();
      double sum = 0.0;
      for (int x = -h; x <= h; ++x)
        for (int y = -h; y <= h; ++y) sum += f[d.index(c.center + Vertex{x, y})];
      const double avg = sum / double(c.volume());
      acc += avg * avg;
    }
    const double term = double(lattice::pow3(n)) * std::sqrt(acc / double(cells.size()));
    r.scale_terms.push_back(term);
    r.rhs += term;
  }
  r.C = r.rhs > 0.0 ? r.lhs / r.rhs : (r.lhs > 0.0 ? INFINITY : 0.0);
  return r;
}

nlohmann::json OscillationReport::to_json() const {
  return {{"m", m}, {"oscillation", oscillation}, {"gradient_norm", gradient_norm}, {"C", C}};
}

OscillationReport l2_oscillation_vs_gradient(std::span<const double> u, int m) {
  const lattice::TriadicCube cube{m, {0, 0}};
  const Domain d = poincare_domain(m);
  if (u.size() != d.box_size()) throw std::invalid_argument("oscillation: u has the wrong size");
  const double vol = double(cube.volume());
  OscillationReport r;
  r.m = m;
  double mean = 0.0;
  for (std::size_t i : d.interior()) mean += u[i];
  mean /= vol;
  double s2 = 0.0;
  for (std::size_t i : d.interior()) s2 += (u[i] - mean) * (u[i] - mean);
  r.oscillation = std::sqrt(s2 / vol);
  /// Gradients along edges inside the cube only.
  double q = 0.0;
  for (int dir : {0, 2}) {
    std::vector<double> g(d.box_size(), 0.0);
    for (std::size_t i : d.interior()) {
      const std::size_t j = std::size_t(long(i) + d.offset(dir));
      if (d.site(j) == lattice::SiteKind::interior) g[i] = u[j] - u[i];
    }
    q += quadratic_form(d, g);
  }
  r.gradient_norm = std::sqrt(std::max(0.0, q) / vol);
  const double scale = std::max(1.0, std::abs(mean));
  if (r.oscillation <= 1e-13 * scale)
    r.C = 0.0;
  else
    r.C = r.gradient_norm > 0.0 ? r.oscillation / r.gradient_norm : INFINITY;
  return r;
}

const char* random_family_name(int trial) {
  static const char* names[] = {"gaussian", "constant", "sine", "checkerboard", "point", "cells"};
  return names[trial % 6];
}

std::vector<double> random_cube_function(int m, int trial, std::uint64_t seed) {
  const lattice::TriadicCube cube{m, {0, 0}};
  const Domain d = poincare_domain(m);
  auto rng = stats::make_rng(seed, std::uint64_t(m) * 100003u + std::uint64_t(trial));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> f(d.box_size(), 0.0);
  const int h = cube.half_width();
  const double side = double(cube.side());
  switch (trial % 6) {
    case 0:
      for (std::size_t i : d.interior()) f[i] = normal(rng);
      break;
    case 1: {
      const double c = normal(rng);
      for (std::size_t i : d.interior()) f[i] = c;
      break;
    }
    case 2: {
      const int kx = 1 + int(unif(rng) * 3), ky = 1 + int(unif(rng) * 3);
      const double px = 2.0 * std::numbers::pi * unif(rng), py = 2.0 * std::numbers::pi * unif(rng);
      for (std::size_t i : d.interior()) {
        const Vertex v = d.vertex(i);
        f[i] = std::sin(std::numbers::pi * kx * (v.x + h) / side + px) *
               std::sin(std::numbers::pi * ky * (v.y + h) / side + py);
      }
      break;
    }
    case 3: {
      const double c = normal(rng);
      for (std::size_t i : d.interior()) {
        const Vertex v = d.vertex(i);
        f[i] = ((v.x + v.y) % 2 == 0) ? c : -c;
      }
      break;
    }
    case 4: {
      const auto& in = d.interior();
      f[in[std::size_t(unif(rng) * double(in.size())) % in.size()]] = 1.0 + normal(rng) * normal(rng);
      break;
    }
    default: {
      const int n = int(unif(rng) * m) % std::max(1, m);
      for (const auto& c : lattice::triadic_partition(m, n)) {
        const double val = normal(rng);
        const int ch = c.half_width();
        for (int x = -ch; x <= ch; ++x)
          for (int y = -ch; y <= ch; ++y) f[d.index(c.center + Vertex{x, y})] = val;
      }
      break;
    }
  }
  return f;
}

std::size_t PoincareSuiteReport::violations(double C_poincare, double C_oscillation) const {
  std::size_t v = 0;
  for (const auto& e : entries)
    if (!(e.poincare.C <= C_poincare) || !(e.oscillation.C <= C_oscillation)) ++v;
  return v;
}

nlohmann::json PoincareSuiteReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : entries)
    rows.push_back({{"m", e.m}, {"trial", e.trial}, {"family", e.family}, {"C_poincare", e.poincare.C},
                    {"C_oscillation", e.oscillation.C}});
  return {{"max_C_poincare", max_C_poincare}, {"max_C_oscillation", max_C_oscillation}, {"entries", rows}};
}

PoincareSuiteReport poincare_suite(int m_max, int trials, std::uint64_t seed) {
  if (m_max < 1) throw std::invalid_argument("poincare_suite: m_max must be >= 1");
  PoincareSuiteReport r;
  for (int m = 1; m <= m_max; ++m)
    for (int t = 0; t < trials; ++t) {
      PoincareSuiteEntry e;
      e.m = m;
      e.trial = t;
      e.family = random_family_name(t);
      const auto f = random_cube_function(m, t, seed);
      e.poincare = multiscale_poincare_check(f, m);
      e.oscillation = l2_oscillation_vs_gradient(f, m);
      r.max_C_poincare = std::max(r.max_C_poincare, e.poincare.C);
      r.max_C_oscillation = std::max(r.max_C_oscillation, e.oscillation.C);
      r.entries.push_back(std::move(e));
    }
  return r;
}

}  // namespace gradlab::elliptic
