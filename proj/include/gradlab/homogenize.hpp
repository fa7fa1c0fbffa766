#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "gradlab/elliptic.hpp"
#include "gradlab/lattice.hpp"
#include "gradlab/multiscale.hpp"
#include "gradlab/potential.hpp"
#include "gradlab/sampler.hpp"
#include "gradlab/stats.hpp"

namespace gradlab::homogenize {

using lattice::Domain;
using lattice::DomainPtr;
using gradlab::Edge;
using lattice::FieldConfig;
using lattice::TriadicCube;

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Phi_R(f) = R^{-1} sum_e grad phi(e) f(e) over directed edges of a domain.
struct LinearStatistic {
  DomainPtr domain;
  std::vector<Edge> edges;
  std::vector<double> weights;  ///< f_R(e), one per edge
  double R = 1.0;
  double divergence_sup = 0.0;  ///< max |div f| over the interior

  /// (div f)(x) = sum_{e: head = x} f(e) - sum_{e: tail = x} f(e), box-sized.
  std::vector<double> divergence() const;
  nlohmann::json to_json() const;
};

double phi_R(const LinearStatistic& s, const FieldConfig& f);

/// Observable form of phi_R for use with the sampler.
sampler::Observable statistic_observable(const LinearStatistic& s);

/// f_r(e) = r * grad u(e) with grad^T grad u = rho on d and u = 0 on the
/// boundary, so div f = r rho and Phi_r(f) = sum rho phi for fields vanishing
/// on the boundary. rho must be supported on the interior.
LinearStatistic build_fR_from_rho(DomainPtr d, const lattice::SiteWeights& rho, double r);

/// Gaussian (quadratic V, zero boundary) variance of Phi_R: R^{-2} (div f)^T G (div f).
double gaussian_variance(const LinearStatistic& s);

struct VarianceResult {
  double estimate = 0.0;
  double se = 0.0;
  double ess = 0.0;
  bool low_ess = false;  ///< ess < 10
  nlohmann::json to_json() const;
};

/// Sample variance of Phi_R over the batch configurations with blocked
/// jackknife error.
VarianceResult mc_variance(const LinearStatistic& s, const sampler::SampleBatch& batch);
/// Same for an already evaluated series with the given chain layout.
VarianceResult mc_variance(std::span<const double> series,
                           std::span<const std::size_t> chain_lengths);

struct GOptions {
  std::vector<int> N_list;
  int k = 1;
  double gamma = 0.5;
  double r_min = 8.0;
  std::size_t samples = 2000;
  std::uint64_t seed = 0;
  sampler::SweepKind kind = sampler::SweepKind::multigrid;
  unsigned threads = 1;
};

struct GEntry {
  int N = 0;
  double radius = 0.0;
  VarianceResult g_hat;
  double gaussian = 0.0;  ///< rho^T G rho on B_{r_k}
  double lower = 0.0;     ///< gaussian / Lambda
  double upper = 0.0;     ///< gaussian / lambda (Brascamp-Lieb)
};

struct GReport {
  std::vector<GEntry> entries;
  bool stabilized = false;  ///< last two estimates within 3 combined standard errors
  nlohmann::json to_json() const;
};

/// Var(A_k) under the zero-boundary measure on B_{r_k}(0), for each N.
GReport estimate_g(const potential::Potential& p, const GOptions& opt);

/// a(e) = V''(grad phi(e)) frozen from one configuration, on the field's box.
struct QuenchedCoefficient {
  DomainPtr domain;
  std::vector<double> cx;  ///< edge (i, i + e1); 0 when the edge leaves the closure
  std::vector<double> cy;  ///< edge (i, i + e2)
  double lambda = 1.0;
  double Lambda = 1.0;

  static QuenchedCoefficient from_field(const FieldConfig& f, const potential::Potential& p);
  static QuenchedCoefficient constant(DomainPtr d, double c);
  /// Conductances on cube_domain(q) covering every edge (x, x + e_i), x in q.
  elliptic::Conductance restrict_to(const TriadicCube& q) const;
};

/// Corrector problem on a triadic cube. Each cube vertex x owns the edges
/// (x, x + e_i); values beyond the cube follow l_p. With this convention the
/// children of a cube partition its edges.
struct EnergyReport {
  TriadicCube cube;
  Vec2 p{};
  double nu = 0.0;      ///< (1/|Q|) 1/2 sum a (grad v)^2
  Mat2 ahom{};          ///< flux averages of the unit-slope correctors
  Vec2 flux_avg{};      ///< (1/|Q|) sum a grad v
  std::vector<double> corrector;  ///< v on the cube domain box
  long iterations = 0;
  nlohmann::json to_json() const;
};

EnergyReport quenched_corrector(const QuenchedCoefficient& a, const TriadicCube& q, Vec2 p);

/// nu(Q, p) alone (one solve).
double quenched_nu(const QuenchedCoefficient& a, const TriadicCube& q, Vec2 p);

struct QuadraticFit {
  double constant = 0.0;
  Mat2 Q{};  ///< nu(p) ~ constant + p^T Q p
  double max_residual = 0.0;
  double polarization_gap = 0.0;  ///< max |2 Q - ahom| entrywise
};

struct LevelCheck {
  int level = 0;
  QuadraticFit fit;
  Mat2 ahom{};
  std::array<double, 2> eigenvalues{};
  double dispersion = 0.0;  ///< std of ahom entries over the level cells of the top cube
};

struct SubadditivityCheck {
  int parent = 0;
  int child = 0;
  Vec2 p{};
  double nu_parent = 0.0;
  double nu_children_mean = 0.0;
  bool ok = false;
};

struct SubadditivityReport {
  std::vector<LevelCheck> levels;
  std::vector<SubadditivityCheck> pairs;
  double tolerance = 1e-10;
  bool all_ok() const;
  nlohmann::json to_json() const;
};

/// Quadratic fit over the slopes {+-e1, +-e2, e1 + e2, 0}, the cell average of
/// nu over children against the parent, and ahom across levels.
SubadditivityReport subadditivity_and_quadratic_check(const QuenchedCoefficient& a,
                                                      const std::vector<int>& levels,
                                                      const std::vector<Vec2>& p_list);

struct FluxLevel {
  int level = 0;
  Vec2 mean{};
  Vec2 variance{};
  double total_variance = 0.0;
};

struct FluxReport {
  Vec2 p{};
  std::size_t ensemble = 0;
  std::vector<FluxLevel> levels;
  bool decreasing() const;
  nlohmann::json to_json() const;
};

/// Ensemble variance of the cube-averaged flux (a grad v)_Q for Q = box_m
/// centred at the origin.
FluxReport flux_concentration(const std::vector<QuenchedCoefficient>& ensemble,
                              const std::vector<int>& levels, Vec2 p = {1.0, 0.0});

/// Vector source field on the unit square [-1/2, 1/2]^2.
using Source = std::function<Vec2(double, double)>;

/// F(X) = (s, s) with s = sin(pi (X1 + 1/2)) sin(pi (X2 + 1/2)).
Source sine_source();

struct TwoScaleLevel {
  int level = 0;
  double eps = 0.0;              ///< 1 / (side - 1): the cube maps onto [-1/2, 1/2]^2
  Mat2 ahom{};
  double homogenization = 0.0;   ///< ||u_eps - u||, volume-normalized L^2
  double two_scale = 0.0;        ///< ||u_eps - w_eps||
  double solution_norm = 0.0;    ///< ||u||
};

struct TwoScaleReport {
  std::vector<TwoScaleLevel> levels;
  nlohmann::json to_json() const;
};

/// For each level n: the heterogeneous solution of div a grad u = div F_eps on
/// box_n (zero Dirichlet data, F_eps(x) = eps F(eps x) on edge midpoints), the
/// homogenized solution with the constant tensor ahom(box_n), and the
/// two-scale expansion w = u + sum_i (grad_i u) chi_i built from the cube
/// correctors.
TwoScaleReport two_scale_residual(const QuenchedCoefficient& a, const std::vector<int>& levels,
                                  const Source& F);

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
std::array<double, 2> symmetric_eigenvalues(const Mat2& m);

}  // namespace gradlab::homogenize
