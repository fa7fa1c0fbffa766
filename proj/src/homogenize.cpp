#include "gradlab/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace gradlab::homogenize {

namespace {

constexpr Vertex kE[2] = {{1, 0}, {0, 1}};

nlohmann::json mat_json(const Mat2& m) { return {{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}; }

/// Solution of the cube corrector problem together with its energy and flux.
struct CubeSolve {
  std::vector<double> v;
  double energy = 0.0;  // sum a (grad v)^2 over owned edges
  Vec2 flux{};          // sum a grad v over owned edges
  long iterations = 0;
};

CubeSolve solve_cube(const Domain& cd, const elliptic::Conductance& c, Vertex center, Vec2 p) {
  auto ell = [&](Vertex y) { return p[0] * (y.x - center.x) + p[1] * (y.y - center.y); };
  std::vector<double> g(cd.box_size(), 0.0);
  for (std::size_t b : cd.boundary()) g[b] = ell(cd.vertex(b));
  elliptic::SolveOptions opt;
  opt.tol = elliptic::kTightTol;
  auto sol = elliptic::solve_dirichlet(cd, g, {}, &c, opt);
  CubeSolve out;
  out.v = std::move(sol.u);
  out.iterations = sol.iterations;
  for (std::size_t i = 0; i < cd.box_size(); ++i) {
    const Vertex x = cd.vertex(i);
    for (int dir = 0; dir < 2; ++dir) {
      const Vertex y = x + kE[dir];
      const double vy = cd.in_box(y) ? out.v[cd.index(y)] : ell(y);
      const double grad = vy - out.v[i];
      const double a = dir == 0 ? c.cx[i] : c.cy[i];
      out.energy += a * grad * grad;
      out.flux[dir] += a * grad;
    }
  }
  return out;
}

Mat2 ahom_from(const Domain& cd, const elliptic::Conductance& c, Vertex center,
               std::vector<double>* chi1 = nullptr, std::vector<double>* chi2 = nullptr) {
  const double vol = double(cd.box_size());
  Mat2 m{};
  for (int j = 0; j < 2; ++j) {
    const Vec2 p = j == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    CubeSolve s = solve_cube(cd, c, center, p);
    for (int i = 0; i < 2; ++i) m[i][j] = s.flux[i] / vol;
    auto* chi = j == 0 ? chi1 : chi2;
    if (chi != nullptr) {
      chi->assign(cd.box_size(), 0.0);
      for (std::size_t k = 0; k < cd.box_size(); ++k) {
        const Vertex x = cd.vertex(k);
        (*chi)[k] = s.v[k] - (j == 0 ? x.x - center.x : x.y - center.y);
      }
    }
  }
  return m;
}

}  // namespace

std::vector<double> LinearStatistic::divergence() const {
  std::vector<double> div(domain->box_size(), 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    div[domain->index(edges[e].head)] += weights[e];
    div[domain->index(edges[e].tail)] -= weights[e];
  }
  return div;
}

nlohmann::json LinearStatistic::to_json() const {
  return {{"domain", domain->descriptor()}, {"R", R}, {"edges", edges.size()},
          {"divergence_sup", divergence_sup}};
}

double phi_R(const LinearStatistic& s, const FieldConfig& f) {
  const Domain& d = *s.domain;
  double acc = 0.0;
  for (std::size_t e = 0; e < s.edges.size(); ++e)
    acc += s.weights[e] * (f.values[d.index(s.edges[e].head)] - f.values[d.index(s.edges[e].tail)]);
  return acc / s.R;
}

sampler::Observable statistic_observable(const LinearStatistic& s) {
  std::vector<std::size_t> head, tail;
  for (const Edge& e : s.edges) {
    head.push_back(s.domain->index(e.head));
    tail.push_back(s.domain->index(e.tail));
  }
  return [head = std::move(head), tail = std::move(tail), w = s.weights,
          R = s.R](const FieldConfig& f) {
    double acc = 0.0;
    for (std::size_t e = 0; e < w.size(); ++e) acc += w[e] * (f.values[head[e]] - f.values[tail[e]]);
    return acc / R;
  };
}

LinearStatistic build_fR_from_rho(DomainPtr d, const lattice::SiteWeights& rho, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("build_fR_from_rho: r must be positive");
  const auto box = lattice::to_box(rho, *d, lattice::Extension::strict);
  for (std::size_t i = 0; i < box.size(); ++i)
    if (box[i] != 0.0 && d->site(i) != lattice::SiteKind::interior)
      throw std::invalid_argument("build_fR_from_rho: rho must be supported on the interior");
  elliptic::SolveOptions opt;
  opt.tol = elliptic::kTightTol;
  const auto u = elliptic::solve_dirichlet(*d, {}, box, nullptr, opt).u;
  LinearStatistic s;
  s.domain = d;
  s.R = r;
  s.edges = d->energy_edges();
  for (const Edge& e : s.edges) s.weights.push_back(r * (u[d->index(e.head)] - u[d->index(e.tail)]));
  const auto div = s.divergence();
  for (std::size_t i : d->interior()) s.divergence_sup = std::max(s.divergence_sup, std::abs(div[i]));
  return s;
}

double gaussian_variance(const LinearStatistic& s) {
  elliptic::SolveOptions opt;
  opt.tol = elliptic::kTightTol;
  return elliptic::quadratic_form(*s.domain, s.divergence(), opt) / (s.R * s.R);
}

nlohmann::json VarianceResult::to_json() const {
  return {{"estimate", estimate}, {"se", se}, {"ess", ess}, {"low_ess", low_ess}};
}

VarianceResult mc_variance(std::span<const double> series,
                           std::span<const std::size_t> chain_lengths) {
  if (series.empty()) throw std::invalid_argument("mc_variance: empty batch");
  VarianceResult r;
  r.ess = chain_lengths.empty() ? stats::effective_sample_size(series)
                                : stats::effective_sample_size(series, chain_lengths);
  const auto e = stats::variance_estimate(series, r.ess);
  r.estimate = e.value;
  r.se = e.se;
  r.low_ess = r.ess < 10.0;
  return r;
}

VarianceResult mc_variance(const LinearStatistic& s, const sampler::SampleBatch& batch) {
  if (batch.configs.empty()) throw std::invalid_argument("mc_variance: batch holds no configurations");
  std::vector<double> x;
  x.reserve(batch.configs.size());
  const auto obs = statistic_observable(s);
  for (const auto& c : batch.configs) x.push_back(obs(c));
  return mc_variance(x, batch.chain_lengths);
}

nlohmann::json GReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : entries)
    rows.push_back({{"N", e.N},
                    {"radius", e.radius},
                    {"g_hat", e.g_hat.to_json()},
                    {"gaussian", e.gaussian},
                    {"lower", e.lower},
                    {"upper", e.upper}});
  return {{"entries", rows}, {"stabilized", stabilized}};
}

GReport estimate_g(const potential::Potential& p, const GOptions& opt) {
  if (opt.N_list.empty()) throw std::invalid_argument("estimate_g: empty N list");
  if (!std::is_sorted(opt.N_list.begin(), opt.N_list.end()) ||
      std::adjacent_find(opt.N_list.begin(), opt.N_list.end()) != opt.N_list.end())
    throw std::invalid_argument("estimate_g: N list must be increasing");
  GReport rep;
  for (std::size_t j = 0; j < opt.N_list.size(); ++j) {
    const int N = opt.N_list[j];
    const auto ladder = multiscale::make_ladder(N, opt.gamma, opt.r_min);
    if (opt.k > ladder.k_max) throw std::invalid_argument("estimate_g: k beyond the ladder");
    GEntry e;
    e.N = N;
    e.radius = ladder.r(opt.k);
    auto d = std::make_shared<const Domain>(Domain::ball({0, 0}, e.radius));
    /// Only A_k is needed; X at r_k and r_{k,+} reach past the ball.
    const auto rho = multiscale::rho_weights({0, 0}, opt.k, ladder);
    const auto rho_c = lattice::compile(rho.weights, *d, lattice::Extension::strict);
    sampler::SamplerOptions so;
    so.n_samples = opt.samples;
    so.seed = opt.seed + 7919ULL * j;
    so.kind = opt.kind;
    so.threads = opt.threads;
    so.keep_configs = false;
    so.observables = {[&rho_c](const FieldConfig& c) { return rho_c.apply(c.values); }};
    so.observable_names = {"A_k"};
    const auto bc = sampler::BoundaryCondition::zero(*d);
    const auto batch = p.kind() == potential::Potential::Kind::quadratic
                           ? sampler::exact_gaussian_sample(d, bc, so)
                           : sampler::sample_batch(d, bc, p, so);
    e.g_hat = mc_variance(batch.series[1], batch.chain_lengths);
    elliptic::SolveOptions sopt;
    sopt.tol = elliptic::kTightTol;
    e.gaussian = elliptic::quadratic_form(*d, lattice::to_box(rho.weights, *d, lattice::Extension::strict), sopt);
    e.lower = e.gaussian / p.Lambda();
    e.upper = e.gaussian / p.lambda();
    rep.entries.push_back(e);
  }
  if (rep.entries.size() >= 2) {
    const auto& a = rep.entries[rep.entries.size() - 2].g_hat;
    const auto& b = rep.entries.back().g_hat;
    rep.stabilized = std::abs(a.estimate - b.estimate) <= 3.0 * std::hypot(a.se, b.se);
  }
  return rep;
}

QuenchedCoefficient QuenchedCoefficient::from_field(const FieldConfig& f, const potential::Potential& p) {
  const Domain& d = *f.domain;
  QuenchedCoefficient a;
  a.domain = f.domain;
  a.lambda = p.lambda();
  a.Lambda = p.Lambda();
  a.cx.assign(d.box_size(), 0.0);
  a.cy.assign(d.box_size(), 0.0);
  for (std::size_t i = 0; i < d.box_size(); ++i) {
    const Vertex x = d.vertex(i);
    if (!d.in_closure(x)) continue;
    for (int dir = 0; dir < 2; ++dir) {
      const Vertex y = x + kE[dir];
      if (!d.in_closure(y)) continue;
      (dir == 0 ? a.cx : a.cy)[i] = p.d2(f.values[d.index(y)] - f.values[i]);
    }
  }
  return a;
}

QuenchedCoefficient QuenchedCoefficient::constant(DomainPtr d, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("constant coefficient must be positive");
  QuenchedCoefficient a;
  a.domain = d;
  a.lambda = a.Lambda = c;
  a.cx.assign(d->box_size(), 0.0);
  a.cy.assign(d->box_size(), 0.0);
  for (std::size_t i = 0; i < d->box_size(); ++i) {
    const Vertex x = d->vertex(i);
    if (!d->in_closure(x)) continue;
    if (d->in_closure(x + kE[0])) a.cx[i] = c;
    if (d->in_closure(x + kE[1])) a.cy[i] = c;
  }
  return a;
}

elliptic::Conductance QuenchedCoefficient::restrict_to(const TriadicCube& q) const {
  const Domain cd = elliptic::cube_domain(q);
  elliptic::Conductance c;
  c.cx.resize(cd.box_size());
  c.cy.resize(cd.box_size());
  for (std::size_t i = 0; i < cd.box_size(); ++i) {
    const Vertex x = cd.vertex(i);
    for (int dir = 0; dir < 2; ++dir) {
      if (!domain->in_closure(x) || !domain->in_closure(x + kE[dir]))
        throw std::out_of_range("cube edges reach outside the coefficient field");
      (dir == 0 ? c.cx : c.cy)[i] = (dir == 0 ? cx : cy)[domain->index(x)];
    }
  }
  return c;
}

nlohmann::json EnergyReport::to_json() const {
  return {{"model", "quenched"},
          {"level", cube.level},
          {"center", {cube.center.x, cube.center.y}},
          {"p", {p[0], p[1]}},
          {"nu", nu},
          {"ahom", mat_json(ahom)},
          {"flux_avg", {flux_avg[0], flux_avg[1]}},
          {"iterations", iterations}};
}

EnergyReport quenched_corrector(const QuenchedCoefficient& a, const TriadicCube& q, Vec2 p) {
  const Domain cd = elliptic::cube_domain(q);
  const auto c = a.restrict_to(q);
  const double vol = double(cd.box_size());
  CubeSolve s = solve_cube(cd, c, q.center, p);
  EnergyReport r;
  r.cube = q;
  r.p = p;
  r.nu = 0.5 * s.energy / vol;
  r.flux_avg = {s.flux[0] / vol, s.flux[1] / vol};
  r.corrector = std::move(s.v);
  r.iterations = s.iterations;
  r.ahom = ahom_from(cd, c, q.center);
  return r;
}

double quenched_nu(const QuenchedCoefficient& a, const TriadicCube& q, Vec2 p) {
  const Domain cd = elliptic::cube_domain(q);
  return 0.5 * solve_cube(cd, a.restrict_to(q), q.center, p).energy / double(cd.box_size());
}

std::array<double, 2> symmetric_eigenvalues(const Mat2& m) {
  const double tr = 0.5 * (m[0][0] + m[1][1]);
  const double off = 0.5 * (m[0][1] + m[1][0]);
  const double disc = std::hypot(0.5 * (m[0][0] - m[1][1]), off);
  return {tr - disc, tr + disc};
}

bool SubadditivityReport::all_ok() const {
  return std::all_of(pairs.begin(), pairs.end(), [](const auto& p) { return p.ok; });
}

nlohmann::json SubadditivityReport::to_json() const {
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& l : levels)
    lv.push_back({{"level", l.level},
                  {"fit_constant", l.fit.constant},
                  {"fit_Q", mat_json(l.fit.Q)},
                  {"fit_max_residual", l.fit.max_residual},
                  {"polarization_gap", l.fit.polarization_gap},
                  {"ahom", mat_json(l.ahom)},
                  {"eigenvalues", {l.eigenvalues[0], l.eigenvalues[1]}},
                  {"dispersion", l.dispersion}});
  nlohmann::json pr = nlohmann::json::array();
  for (const auto& p : pairs)
    pr.push_back({{"parent", p.parent},
                  {"child", p.child},
                  {"p", {p.p[0], p.p[1]}},
                  {"nu_parent", p.nu_parent},
                  {"nu_children_mean", p.nu_children_mean},
                  {"ok", p.ok}});
  return {{"model", "quenched"}, {"levels", lv}, {"pairs", pr}, {"tolerance", tolerance},
          {"all_ok", all_ok()}};
}

SubadditivityReport subadditivity_and_quadratic_check(const QuenchedCoefficient& a,
                                                      const std::vector<int>& levels,
                                                      const std::vector<Vec2>& p_list) {
  if (levels.empty()) throw std::invalid_argument("subadditivity check: no levels");
  for (int m : levels)
    if (m < 1 || m > 4) throw std::invalid_argument("subadditivity check: levels must lie in [1, 4]");
  std::vector<Vec2> slopes = p_list;
  if (slopes.empty()) slopes = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {0, 0}};
  const int top = *std::max_element(levels.begin(), levels.end());

  SubadditivityReport rep;
  for (int m : levels) {
    const TriadicCube q{m, {0, 0}};
    LevelCheck lc;
    lc.level = m;
    Eigen::MatrixXd M(long(slopes.size()), 4);
    Eigen::VectorXd y(long(slopes.size()));
    for (std::size_t j = 0; j < slopes.size(); ++j) {
      const Vec2 p = slopes[j];
      M.row(long(j)) << 1.0, p[0] * p[0], 2.0 * p[0] * p[1], p[1] * p[1];
      y[long(j)] = quenched_nu(a, q, p);
    }
    const Eigen::VectorXd c = M.colPivHouseholderQr().solve(y);
    lc.fit.constant = c[0];
    lc.fit.Q = {{{c[1], c[2]}, {c[2], c[3]}}};
    lc.fit.max_residual = (M * c - y).cwiseAbs().maxCoeff();
    const Domain cd = elliptic::cube_domain(q);
    lc.ahom = ahom_from(cd, a.restrict_to(q), q.center);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        lc.fit.polarization_gap = std::max(lc.fit.polarization_gap, std::abs(2.0 * lc.fit.Q[i][j] - lc.ahom[i][j]));
    lc.eigenvalues = symmetric_eigenvalues(lc.ahom);

    const auto cells = lattice::triadic_partition(top, m, {0, 0});
    if (cells.size() > 1) {
      std::vector<Mat2> all;
      Mat2 mean{};
      for (const auto& cell : cells) {
        all.push_back(ahom_from(elliptic::cube_domain(cell), a.restrict_to(cell), cell.center));
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) mean[i][j] += all.back()[i][j] / double(cells.size());
      }
      double s = 0.0;
      for (const auto& A : all)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) s += (A[i][j] - mean[i][j]) * (A[i][j] - mean[i][j]);
      lc.dispersion = std::sqrt(s / double(cells.size() - 1));
    }
    rep.levels.push_back(lc);
  }

  for (int n : levels)
    for (int m : levels) {
      if (m >= n) continue;
      const auto cells = lattice::triadic_partition(n, m, {0, 0});
      for (const Vec2& p : slopes) {
        if (p[0] == 0.0 && p[1] == 0.0) continue;
        SubadditivityCheck sc;
        sc.parent = n;
        sc.child = m;
        sc.p = p;
        sc.nu_parent = quenched_nu(a, {n, {0, 0}}, p);
        for (const auto& cell : cells) sc.nu_children_mean += quenched_nu(a, cell, p);
        sc.nu_children_mean /= double(cells.size());
        sc.ok = sc.nu_children_mean >= sc.nu_parent - rep.tolerance * std::max(1.0, sc.nu_parent);
        rep.pairs.push_back(sc);
      }
    }
  return rep;
}

bool FluxReport::decreasing() const {
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (!(levels[i].total_variance < levels[i - 1].total_variance)) return false;
  return !levels.empty();
}

nlohmann::json FluxReport::to_json() const {
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& l : levels)
    lv.push_back({{"level", l.level},
                  {"mean", {l.mean[0], l.mean[1]}},
                  {"variance", {l.variance[0], l.variance[1]}},
                  {"total_variance", l.total_variance}});
  return {{"model", "quenched"}, {"p", {p[0], p[1]}}, {"ensemble", ensemble}, {"levels", lv},
          {"decreasing", decreasing()}};
}

FluxReport flux_concentration(const std::vector<QuenchedCoefficient>& ensemble,
                              const std::vector<int>& levels, Vec2 p) {
  if (ensemble.size() < 2) throw std::invalid_argument("flux_concentration: need at least two samples");
  FluxReport rep;
  rep.p = p;
  rep.ensemble = ensemble.size();
  for (int m : levels) {
    const TriadicCube q{m, {0, 0}};
    const Domain cd = elliptic::cube_domain(q);
    const double vol = double(cd.box_size());
    std::vector<double> fx, fy;
    for (const auto& a : ensemble) {
      const CubeSolve s = solve_cube(cd, a.restrict_to(q), q.center, p);
      fx.push_back(s.flux[0] / vol);
      fy.push_back(s.flux[1] / vol);
    }
    FluxLevel fl;
    fl.level = m;
    fl.mean = {stats::mean(fx), stats::mean(fy)};
    fl.variance = {stats::variance(fx), stats::variance(fy)};
    fl.total_variance = fl.variance[0] + fl.variance[1];
    rep.levels.push_back(fl);
  }
  return rep;
}

Source sine_source() {
  return [](double X1, double X2) {
    const double s = std::sin(std::numbers::pi * (X1 + 0.5)) * std::sin(std::numbers::pi * (X2 + 0.5));
    return Vec2{s, s};
  };
}

nlohmann::json TwoScaleReport::to_json() const {
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& l : levels)
    lv.push_back({{"level", l.level},
                  {"eps", l.eps},
                  {"ahom", mat_json(l.ahom)},
                  {"homogenization", l.homogenization},
                  {"two_scale", l.two_scale},
                  {"solution_norm", l.solution_norm}});
  return {{"model", "quenched"}, {"levels", lv}};
}

TwoScaleReport two_scale_residual(const QuenchedCoefficient& a, const std::vector<int>& levels,
                                  const Source& F) {
  TwoScaleReport rep;
  elliptic::SolveOptions opt;
  opt.tol = elliptic::kTightTol;
  for (int n : levels) {
    const TriadicCube q{n, {0, 0}};
    const Domain cd = elliptic::cube_domain(q);
    const auto c = a.restrict_to(q);
    const std::size_t nb = cd.box_size();
    TwoScaleLevel tl;
    tl.level = n;
    tl.eps = 1.0 / double(q.side() - 1);
    std::vector<double> chi[2];
    tl.ahom = ahom_from(cd, c, q.center, &chi[0], &chi[1]);

    // div F_eps on the interior.
    std::vector<double> rhs(nb, 0.0);
    for (std::size_t i = 0; i < nb; ++i) {
      const Vertex x = cd.vertex(i) - q.center;
      for (int dir = 0; dir < 2; ++dir) {
        const double X1 = tl.eps * (x.x + 0.5 * kE[dir].x);
        const double X2 = tl.eps * (x.y + 0.5 * kE[dir].y);
        const double w = tl.eps * F(X1, X2)[dir];
        const Vertex y = cd.vertex(i) + kE[dir];
        if (cd.in_box(y)) rhs[cd.index(y)] += w;
        rhs[i] -= w;
      }
    }
    const auto ueps = elliptic::solve_dirichlet(cd, {}, rhs, &c, opt).u;

    // Homogenized problem: energy 1/2 sum_x grad u(x)^T ahom grad u(x) over
    // forward gradients, u = 0 off the interior.
    const auto& interior = cd.interior();
    const Mat2& A = tl.ahom;
    const double a12 = 0.5 * (A[0][1] + A[1][0]);
    auto apply = [&](const std::vector<double>& xin, std::vector<double>& yout) {
      std::vector<double> u(nb, 0.0), out(nb, 0.0);
      for (std::size_t k = 0; k < interior.size(); ++k) u[interior[k]] = xin[k];
      for (std::size_t i = 0; i < nb; ++i) {
        const Vertex x = cd.vertex(i);
        const Vertex y1 = x + kE[0], y2 = x + kE[1];
        const bool in1 = cd.in_box(y1), in2 = cd.in_box(y2);
        const double g1 = (in1 ? u[cd.index(y1)] : 0.0) - u[i];
        const double g2 = (in2 ? u[cd.index(y2)] : 0.0) - u[i];
        const double q1 = A[0][0] * g1 + a12 * g2;
        const double q2 = a12 * g1 + A[1][1] * g2;
        if (in1) out[cd.index(y1)] += q1;
        if (in2) out[cd.index(y2)] += q2;
        out[i] -= q1 + q2;
      }
      for (std::size_t k = 0; k < interior.size(); ++k) yout[k] = out[interior[k]];
    };
    std::vector<double> diag(interior.size(), 2.0 * (A[0][0] + A[1][1] + a12));
    std::vector<double> b(interior.size()), xs(interior.size(), 0.0);
    for (std::size_t k = 0; k < interior.size(); ++k) b[k] = rhs[interior[k]];
    elliptic::pcg(apply, diag, b, xs, opt);
    std::vector<double> u(nb, 0.0);
    for (std::size_t k = 0; k < interior.size(); ++k) u[interior[k]] = xs[k];

    double s_h = 0.0, s_w = 0.0, s_u = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      double w = u[i];
      if (cd.site(i) == lattice::SiteKind::interior) {
        const Vertex x = cd.vertex(i);
        for (int dir = 0; dir < 2; ++dir) {
          const double grad = 0.5 * (u[cd.index(x + kE[dir])] - u[cd.index(x - kE[dir])]);
          w += grad * chi[dir][i];
        }
      }
      s_h += (ueps[i] - u[i]) * (ueps[i] - u[i]);
      s_w += (ueps[i] - w) * (ueps[i] - w);
      s_u += u[i] * u[i];
    }
    tl.homogenization = std::sqrt(s_h / double(nb));
    tl.two_scale = std::sqrt(s_w / double(nb));
    tl.solution_norm = std::sqrt(s_u / double(nb));
    rep.levels.push_back(tl);
  }
  return rep;
}

}  // namespace gradlab::homogenize
