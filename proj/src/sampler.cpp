#include "gradlab/sampler.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <thread>

#include "gradlab/elliptic.hpp"

namespace gradlab::sampler {

namespace {

constexpr long kMaxProposals = 1000000;
// Hat centres are kHatStride * b apart at half-width b.
constexpr int kHatStride = 1;

// Exact draw from exp(-h) with h'' >= kappa by rejection from the Gaussian
// envelope g(t) = h(t1) + h'(t1)(t - t1) + kappa/2 (t - t1)^2 <= h(t), where t1
// is one Newton step from t0. Any t1 gives an exact sampler; the Newton step
// only improves the acceptance rate.
template <class Eval>
double draw_conditional(const Eval& eval, double kappa, double t0, stats::Rng& rng,
                        long max_proposals) {
  const potential::Derivs e0 = eval(t0);
  const double t1 = t0 - e0.d1 / std::max(e0.d2, kappa);
  const potential::Derivs e1 = eval(t1);
  const double centre = t1 - e1.d1 / kappa;
  const double sd = 1.0 / std::sqrt(kappa);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (long k = 0; k < max_proposals; ++k) {
    const double t = centre + sd * normal(rng);
    const double dt = t - t1;
    const double g = e1.v + e1.d1 * dt + 0.5 * kappa * dt * dt;
    const double h = eval(t).v;
    if (unif(rng) <= std::exp(g - h)) return t;
  }
  throw std::runtime_error("heat-bath rejection sampler exceeded the proposal limit");
}

int reach(const Domain& d) {
  return d.kind() == lattice::DomainKind::square ? d.half_width()
                                                 : int(std::ceil(d.radius()));
}

}  // namespace

BoundaryCondition BoundaryCondition::zero(const Domain& d) {
  BoundaryCondition bc;
  bc.kind = Kind::zero;
  bc.values.assign(d.box_size(), 0.0);
  return bc;
}

BoundaryCondition BoundaryCondition::from_function(const Domain& d,
                                                   const std::function<double(Vertex)>& f) {
  BoundaryCondition bc;
  bc.kind = Kind::explicit_values;
  bc.values.assign(d.box_size(), 0.0);
  for (std::size_t i : d.boundary()) bc.values[i] = f(d.vertex(i));
  return bc;
}

double BoundaryCondition::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

ChainState initial_state(DomainPtr d, const BoundaryCondition& bc, std::uint64_t seed,
                         std::uint64_t stream) {
  if (bc.values.size() != d->box_size())
    throw std::invalid_argument("boundary condition does not match the domain");
  ChainState s;
  s.field.domain = d;
  if (bc.kind == BoundaryCondition::Kind::zero)
    s.field.values.assign(d->box_size(), 0.0);
  else
    s.field.values = elliptic::harmonic_extension(*d, bc.values);
  s.rng = stats::make_rng(seed, stream);
  return s;
}

namespace {

// sin and cos of the site values, used by the cos_perturbed fast paths:
// cos(phi(x) - phi(y)) follows from angle addition, so each energy term costs
// a few multiplications.
struct TrigCache {
  std::vector<double> sn, cs;
  void fill(const std::vector<double>& phi) {
    sn.resize(phi.size());
    cs.resize(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) {
      sn[i] = std::sin(phi[i]);
      cs[i] = std::cos(phi[i]);
    }
  }
  void set(std::size_t i, double v) {
    sn[i] = std::sin(v);
    cs[i] = std::cos(v);
  }
};

bool uses_cache(const Potential& p) { return p.kind() == Potential::Kind::cos_perturbed; }

void fine_sweep(ChainState& s, const Potential& p, TrigCache* tc) {
  const Domain& d = *s.field.domain;
  double* phi = s.field.values.data();
  const long off[4] = {d.offset(0), d.offset(1), d.offset(2), d.offset(3)};
  const double kappa = 4.0 * p.lambda();
  for (int parity = 0; parity < 2; ++parity) {
    for (std::size_t i : d.interior_parity(parity)) {
      const long li = long(i);
      const double y0 = phi[li + off[0]], y1 = phi[li + off[1]];
      const double y2 = phi[li + off[2]], y3 = phi[li + off[3]];
      const double Y = y0 + y1 + y2 + y3;
      if (p.kind() == Potential::Kind::quadratic) {
        // Constant terms of h are dropped; only differences of h matter.
        auto eval = [Y](double x) { return potential::Derivs{2.0 * x * x - x * Y, 4.0 * x - Y, 4.0}; };
        phi[i] = draw_conditional(eval, kappa, 0.25 * Y, s.rng, kMaxProposals);
      } else if (tc != nullptr) {
        const double eps = p.eps();
        double A = 0.0, B = 0.0;
        for (int k = 0; k < 4; ++k) {
          A += tc->cs[std::size_t(li + off[k])];
          B += tc->sn[std::size_t(li + off[k])];
        }
        auto eval = [=](double x) {
          const double sx = std::sin(x), cx = std::cos(x);
          const double c = cx * A + sx * B;
          return potential::Derivs{2.0 * x * x - x * Y + eps * c,
                                   4.0 * x - Y + eps * (cx * B - sx * A), 4.0 - eps * c};
        };
        phi[i] = draw_conditional(eval, kappa, 0.25 * Y, s.rng, kMaxProposals);
        tc->set(i, phi[i]);
      } else {
        auto eval = [&](double x) {
          potential::Derivs acc{0.0, 0.0, 0.0};
          for (double y : {y0, y1, y2, y3}) {
            const potential::Derivs e = p.eval(x - y);
            acc.v += e.v;
            acc.d1 += e.d1;
            acc.d2 += e.d2;
          }
          return acc;
        };
        phi[i] = draw_conditional(eval, kappa, 0.25 * Y, s.rng, kMaxProposals);
      }
    }
  }
  ++s.sweep_count;
}

// Hat psi(z) = (1 - |z1 - c1| / b)(1 - |z2 - c2| / b) of half-width b, stored
// relative to its centre. Gradients of psi take few distinct values (classes),
// so sums over edges collapse to sums over classes.
struct HatTemplate {
  int b = 0;
  std::vector<long> site_off;  // flat offsets
  std::vector<double> site_psi;
  std::vector<int> site_cls;  // index into psi_value
  std::vector<double> psi_value;
  std::vector<long> tail_off, head_off;
  std::vector<int> cls;
  std::vector<double> cls_value;
  double S = 0.0;
};

HatTemplate make_hat(int b, long ny) {
  HatTemplate h;
  h.b = b;
  auto psi = [b](Vertex z) {
    const int dx = std::abs(z.x), dy = std::abs(z.y);
    if (dx >= b || dy >= b) return 0.0;
    return (1.0 - double(dx) / b) * (1.0 - double(dy) / b);
  };
  auto flat = [ny](Vertex z) { return long(z.x) * ny + z.y; };
  std::map<double, int> psi_cls, grad_cls;
  for (int x = -b; x <= b; ++x)
    for (int y = -b; y <= b; ++y) {
      const Vertex z{x, y};
      if (const double v = psi(z); v != 0.0) {
        h.site_off.push_back(flat(z));
        h.site_psi.push_back(v);
        auto [it, fresh] = psi_cls.try_emplace(v, int(h.psi_value.size()));
        if (fresh) h.psi_value.push_back(v);
        h.site_cls.push_back(it->second);
      }
      for (Vertex e : {Vertex{1, 0}, Vertex{0, 1}}) {
        const double dp = psi(z + e) - psi(z);
        if (dp == 0.0) continue;
        auto [it, fresh] = grad_cls.try_emplace(dp, int(h.cls_value.size()));
        if (fresh) h.cls_value.push_back(dp);
        h.tail_off.push_back(flat(z));
        h.head_off.push_back(flat(z + e));
        h.cls.push_back(it->second);
        h.S += dp * dp;
      }
    }
  return h;
}

const HatTemplate& cached_hat(int b, long ny) {
  thread_local std::map<std::pair<int, long>, HatTemplate> cache;
  auto it = cache.find({b, ny});
  if (it == cache.end()) it = cache.emplace(std::make_pair(b, ny), make_hat(b, ny)).first;
  return it->second;
}

// True when every template site is interior and every template edge lies in
// the closure.
bool hat_fits(const Domain& d, Vertex c, int b) {
  if (d.kind() == lattice::DomainKind::square) {
    const int lo_x = d.xmin() + 1, hi_x = d.xmin() + d.nx() - 2;
    const int lo_y = d.ymin() + 1, hi_y = d.ymin() + d.ny() - 2;
    return c.x - b + 1 >= lo_x && c.x + b - 1 <= hi_x && c.y - b + 1 >= lo_y &&
           c.y + b - 1 <= hi_y;
  }
  // A ball is convex: if the corners of [c - b, c + b]^2 are inside, so is
  // every lattice point of the square.
  const double r2 = d.radius() * d.radius();
  for (int sx : {-b, b})
    for (int sy : {-b, b})
      if (double(norm2(c + Vertex{sx, sy} - d.center())) >= r2) return false;
  return true;
}

struct HatScratch {
  std::vector<double> g, cls_c, cls_s, trig_s, trig_c;
};

void hat_move(ChainState& s, const Potential& p, const HatTemplate& h, long ci, TrigCache* tc,
              HatScratch& w) {
  double* phi = s.field.values.data();
  const std::size_t ne = h.cls.size();
  const std::size_t nc = h.cls_value.size();
  const double kappa = p.lambda() * h.S;
  double t = 0.0;
  if (p.kind() == Potential::Kind::quadratic || (tc != nullptr)) {
    double q1 = 0.0;
    w.cls_c.assign(nc, 0.0);
    w.cls_s.assign(nc, 0.0);
    for (std::size_t k = 0; k < ne; ++k) {
      const std::size_t hi = std::size_t(ci + h.head_off[k]);
      const std::size_t ti = std::size_t(ci + h.tail_off[k]);
      const std::size_t j = std::size_t(h.cls[k]);
      q1 += (phi[hi] - phi[ti]) * h.cls_value[j];
      if (tc != nullptr) {
        w.cls_c[j] += tc->cs[hi] * tc->cs[ti] + tc->sn[hi] * tc->sn[ti];
        w.cls_s[j] += tc->sn[hi] * tc->cs[ti] - tc->cs[hi] * tc->sn[ti];
      }
    }
    const double S = h.S;
    if (tc == nullptr) {
      auto eval = [=](double u) { return potential::Derivs{u * q1 + 0.5 * u * u * S, q1 + u * S, S}; };
      t = draw_conditional(eval, kappa, 0.0, s.rng, kMaxProposals);
    } else {
      const double eps = p.eps();
      auto eval = [&](double u) {
        double v = u * q1 + 0.5 * u * u * S, d1 = q1 + u * S, d2 = S;
        for (std::size_t j = 0; j < nc; ++j) {
          const double D = h.cls_value[j];
          const double su = std::sin(u * D), cu = std::cos(u * D);
          const double c = cu * w.cls_c[j] - su * w.cls_s[j];
          v += eps * c;
          d1 -= eps * D * (su * w.cls_c[j] + cu * w.cls_s[j]);
          d2 -= eps * D * D * c;
        }
        return potential::Derivs{v, d1, d2};
      };
      t = draw_conditional(eval, kappa, 0.0, s.rng, kMaxProposals);
    }
  } else {
    w.g.resize(ne);
    for (std::size_t k = 0; k < ne; ++k)
      w.g[k] = phi[ci + h.head_off[k]] - phi[ci + h.tail_off[k]];
    auto eval = [&](double u) {
      potential::Derivs acc{0.0, 0.0, 0.0};
      for (std::size_t k = 0; k < ne; ++k) {
        const double dp = h.cls_value[std::size_t(h.cls[k])];
        const potential::Derivs e = p.eval(w.g[k] + u * dp);
        acc.v += e.v;
        acc.d1 += e.d1 * dp;
        acc.d2 += e.d2 * dp * dp;
      }
      return acc;
    };
    t = draw_conditional(eval, kappa, 0.0, s.rng, kMaxProposals);
  }
  if (tc == nullptr) {
    for (std::size_t k = 0; k < h.site_off.size(); ++k)
      phi[std::size_t(ci + h.site_off[k])] += t * h.site_psi[k];
    return;
  }
  // Update the cache by angle addition; psi takes few distinct values.
  const std::size_t np = h.psi_value.size();
  w.trig_s.resize(np);
  w.trig_c.resize(np);
  for (std::size_t j = 0; j < np; ++j) {
    w.trig_s[j] = std::sin(t * h.psi_value[j]);
    w.trig_c[j] = std::cos(t * h.psi_value[j]);
  }
  for (std::size_t k = 0; k < h.site_off.size(); ++k) {
    const std::size_t i = std::size_t(ci + h.site_off[k]);
    const std::size_t j = std::size_t(h.site_cls[k]);
    phi[i] += t * h.site_psi[k];
    const double sn = tc->sn[i] * w.trig_c[j] + tc->cs[i] * w.trig_s[j];
    const double cs = tc->cs[i] * w.trig_c[j] - tc->sn[i] * w.trig_s[j];
    tc->sn[i] = sn;
    tc->cs[i] = cs;
  }
}

void coarse_sweep(ChainState& s, const Potential& p, TrigCache* tc) {
  const Domain& d = *s.field.domain;
  const int R = reach(d);
  HatScratch w;
  for (int b = 2; b <= R; b *= 2) {
    const HatTemplate& h = cached_hat(b, d.ny());
    const int stride = kHatStride * b;
    std::uniform_int_distribution<int> shift(0, stride - 1);
    const int ox = shift(s.rng), oy = shift(s.rng);
    // Only hats that fit inside the interior are used; admissible centres lie
    // at least b away from the box edge.
    const int lo_x = d.xmin() + b, hi_x = d.xmin() + d.nx() - 1 - b;
    const int lo_y = d.ymin() + b, hi_y = d.ymin() + d.ny() - 1 - b;
    for (int cx = lo_x + ox % (hi_x - lo_x + 1); cx <= hi_x; cx += stride)
      for (int cy = lo_y + oy % (hi_y - lo_y + 1); cy <= hi_y; cy += stride) {
        const Vertex c{cx, cy};
        if (hat_fits(d, c, b)) hat_move(s, p, h, long(d.index(c)), tc, w);
      }
  }
}

}  // namespace

void heat_bath_sweep(ChainState& s, const Potential& p) {
  TrigCache tc;
  if (uses_cache(p)) tc.fill(s.field.values);
  fine_sweep(s, p, uses_cache(p) ? &tc : nullptr);
}

void collective_sweep(ChainState& s, const Potential& p) {
  TrigCache tc;
  if (uses_cache(p)) tc.fill(s.field.values);
  coarse_sweep(s, p, uses_cache(p) ? &tc : nullptr);
}

void sweep(ChainState& s, const Potential& p, SweepKind kind) {
  TrigCache tc;
  TrigCache* ptc = nullptr;
  if (uses_cache(p)) {
    tc.fill(s.field.values);
    ptc = &tc;
  }
  fine_sweep(s, p, ptc);
  if (kind == SweepKind::multigrid) coarse_sweep(s, p, ptc);
}

double sample_log_concave(const std::function<potential::Derivs(double)>& eval, double kappa,
                          double t0, stats::Rng& rng, long max_proposals) {
  if (!(kappa > 0.0)) throw std::invalid_argument("sample_log_concave: kappa must be positive");
  return draw_conditional(eval, kappa, t0, rng, max_proposals);
}

Observable linear_observable(const lattice::SiteWeights& w, const Domain& d,
                             lattice::Extension ext) {
  auto c = lattice::compile(w, d, ext);
  return [c = std::move(c)](const FieldConfig& f) { return c.apply(f.values); };
}

long default_burn_in(const Domain& d, SweepKind kind) {
  const long n = reach(d);
  return kind == SweepKind::heat_bath ? 20 * n * n : 100;
}

long default_thinning(const Domain& d, SweepKind kind) {
  const long n = reach(d);
  return kind == SweepKind::heat_bath ? std::max(1L, n * n / 4) : 1;
}

unsigned threads_from_env() {
  const char* s = std::getenv("GRADLAB_THREADS");
  if (s == nullptr || *s == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0' || v < 1) throw std::invalid_argument("GRADLAB_THREADS must be a positive integer");
  return unsigned(v);
}

const char* to_string(SweepKind k) { return k == SweepKind::heat_bath ? "heat_bath" : "multigrid"; }

SweepKind sweep_kind_from_string(const std::string& s) {
  if (s == "heat_bath") return SweepKind::heat_bath;
  if (s == "multigrid") return SweepKind::multigrid;
  throw std::invalid_argument("unknown sweep kind: " + s);
}

namespace {

struct ChainOutput {
  std::vector<FieldConfig> configs;
  std::vector<std::vector<double>> series;
  std::exception_ptr error;
};

void record(const FieldConfig& f, std::size_t centre, const SamplerOptions& opt, ChainOutput& out) {
  out.series[0].push_back(f.values[centre]);
  for (std::size_t j = 0; j < opt.observables.size(); ++j)
    out.series[j + 1].push_back(opt.observables[j](f));
  if (opt.keep_configs) out.configs.push_back(f);
}

template <class Job>
void run_jobs(std::size_t n_jobs, unsigned threads, const Job& job) {
  if (threads <= 1 || n_jobs <= 1) {
    for (std::size_t c = 0; c < n_jobs; ++c) job(c);
    return;
  }
  for (std::size_t start = 0; start < n_jobs; start += threads) {
    std::vector<std::thread> pool;
    for (std::size_t c = start; c < std::min(n_jobs, start + threads); ++c)
      pool.emplace_back([&job, c] { job(c); });
    for (auto& t : pool) t.join();
  }
}

SampleBatch assemble(DomainPtr d, const SamplerOptions& opt, std::vector<ChainOutput>& outs) {
  SampleBatch b;
  b.domain = d;
  b.series.assign(1 + opt.observables.size(), {});
  b.names.push_back("phi_center");
  for (std::size_t j = 0; j < opt.observables.size(); ++j)
    b.names.push_back(j < opt.observable_names.size() ? opt.observable_names[j]
                                                      : "observable_" + std::to_string(j));
  for (auto& o : outs) {
    if (o.error) std::rethrow_exception(o.error);
    b.chain_lengths.push_back(o.series[0].size());
    for (std::size_t j = 0; j < b.series.size(); ++j)
      b.series[j].insert(b.series[j].end(), o.series[j].begin(), o.series[j].end());
    for (auto& c : o.configs) b.configs.push_back(std::move(c));
  }
  for (const auto& s : b.series) b.ess.push_back(stats::effective_sample_size(s, b.chain_lengths));
  b.seed = opt.seed;
  return b;
}

}  // namespace

SampleBatch sample_batch(DomainPtr d, const BoundaryCondition& bc, const Potential& p,
                         const SamplerOptions& opt) {
  if (opt.n_samples == 0) throw std::invalid_argument("sample_batch: n_samples must be >= 1");
  const unsigned chains = std::max(1u, opt.chains);
  if (opt.n_samples < chains) throw std::invalid_argument("sample_batch: fewer samples than chains");
  const long burn = opt.burn_in >= 0 ? opt.burn_in : default_burn_in(*d, opt.kind);
  const long thin = opt.thinning >= 0 ? opt.thinning : default_thinning(*d, opt.kind);
  const unsigned threads = opt.threads == 0 ? threads_from_env() : opt.threads;
  const std::size_t centre = d->index(d->center());
  std::vector<ChainOutput> outs(chains);
  run_jobs(chains, threads, [&](std::size_t c) {
    try {
      ChainOutput& out = outs[c];
      out.series.assign(1 + opt.observables.size(), {});
      const std::size_t n = opt.n_samples / chains + (c < opt.n_samples % chains ? 1 : 0);
      ChainState s = initial_state(d, bc, opt.seed, c);
      for (long k = 0; k < burn; ++k) sweep(s, p, opt.kind);
      for (std::size_t i = 0; i < n; ++i) {
        if (i > 0)
          for (long k = 0; k < thin; ++k) sweep(s, p, opt.kind);
        record(s.field, centre, opt, out);
      }
    } catch (...) {
      outs[c].error = std::current_exception();
    }
  });
  SampleBatch b = assemble(d, opt, outs);
  b.burn_in = burn;
  b.thinning = thin;
  b.kind = opt.kind;
  return b;
}

SampleBatch exact_gaussian_sample(DomainPtr d, const BoundaryCondition& bc,
                                  const SamplerOptions& opt) {
  if (opt.n_samples == 0) throw std::invalid_argument("exact_gaussian_sample: n_samples must be >= 1");
  const auto& interior = d->interior();
  const auto& nbr = d->interior_neighbours();
  const std::size_t n = interior.size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * n);
  for (std::size_t k = 0; k < n; ++k) {
    trip.emplace_back(int(k), int(k), 4.0);
    for (int dir = 0; dir < 4; ++dir)
      if (nbr[4 * k + dir] >= 0) trip.emplace_back(int(k), int(nbr[4 * k + dir]), -1.0);
  }
  Eigen::SparseMatrix<double> A{long(n), long(n)};
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> llt(A);
  if (llt.info() != Eigen::Success) throw std::runtime_error("Cholesky factorization failed");

  ChainState s = initial_state(d, bc, opt.seed, 0);
  const std::vector<double> mean = s.field.values;
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z{long(n)};
  std::vector<ChainOutput> outs(1);
  outs[0].series.assign(1 + opt.observables.size(), {});
  const std::size_t centre = d->index(d->center());
  for (std::size_t i = 0; i < opt.n_samples; ++i) {
    for (long k = 0; k < long(n); ++k) z[k] = normal(s.rng);
    const Eigen::VectorXd y = llt.permutationPinv() * Eigen::VectorXd(llt.matrixU().solve(z));
    for (std::size_t k = 0; k < n; ++k) s.field.values[interior[k]] = mean[interior[k]] + y[long(k)];
    record(s.field, centre, opt, outs[0]);
  }
  SampleBatch b = assemble(d, opt, outs);
  b.exact = true;
  b.burn_in = 0;
  b.thinning = 0;
  return b;
}

double max_abs_field(const FieldConfig& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

bool event_M_indicator(const FieldConfig& f, double R) {
  if (!(R > 1.0)) throw std::invalid_argument("event_M_indicator: R must exceed 1");
  const double L = std::log(R);
  return max_abs_field(f) < L * L;
}

nlohmann::json SampleBatch::summary() const {
  nlohmann::json j;
  j["domain"] = domain->descriptor();
  j["n_samples"] = size();
  j["burn_in"] = burn_in;
  j["thinning"] = thinning;
  j["seed"] = seed;
  j["sweep"] = exact ? "exact_gaussian" : to_string(kind);
  j["chains"] = chain_lengths.size();
  j["series"] = names;
  j["ess"] = ess;
  return j;
}

}  // namespace gradlab::sampler
