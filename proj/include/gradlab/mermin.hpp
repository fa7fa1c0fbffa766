#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <json.hpp>

#include "gradlab/lattice.hpp"
#include "gradlab/potential.hpp"

namespace gradlab::mermin {

using lattice::Domain;

/// Density on the unit circle sampled at M uniform angles 2 pi j / M,
/// normalized so that (2 pi / M) sum f = 1.
struct CircleDensity {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double spacing() const;
  double angle(std::size_t j) const { return double(j) * spacing(); }
  /// f at grid index j taken modulo M (negative j allowed).
  double at(long j) const;

  static CircleDensity uniform(std::size_t M = 4096);
  /// Wrapped normal with mean mu and precision kappa (variance 1 / kappa).
  static CircleDensity wrapped_gaussian(double mu, double kappa, std::size_t M = 4096);
  /// Normalized samples of a nonnegative function; throws on negative values
  /// or zero mass.
  static CircleDensity from_function(const std::function<double(double)>& f, std::size_t M = 4096);
};

/// tau = b on |x|_1 <= 2^{k-1}, b (1 - |x|_1 / 2^k) for 2^{k-1} < |x|_1 < 2^k,
/// 0 beyond.
struct DeformationProfile {
  int k = 0;
  double b = 0.0;
  std::vector<double> values;     ///< on the domain box
  double energy_undirected = 0.0; ///< sum over undirected domain edges of (grad tau)^2
  double energy_both = 0.0;       ///< same sum over both orientations
  double energy_ratio() const { return b == 0.0 ? 0.0 : energy_undirected / (b * b); }
  nlohmann::json to_json() const;
};

double tau_value(int k, double b, Vertex x);

/// Throws if tau is nonzero outside the closure of d, or 2^k exceeds the half
/// width of a square domain.
DeformationProfile make_tau(int k, double b, const Domain& d);

struct PerturbationReport {
  std::size_t dimension = 0;
  std::size_t grid_points = 0;   ///< total configurations
  int n_per_axis = 0;
  double C_used = 0.0;           ///< C with exponent -C b^2: (1/2) Lambda energy_both / b^2
  double exponent = 0.0;         ///< C_used b^2
  double min_log_ratio = 0.0;    ///< min over the grid of log(g+ g- / (e^{-C b^2} g^2))
  double max_abs_log_ratio = 0.0;
  double worst_ratio = 1.0;      ///< exp(min_log_ratio)
  std::size_t violations = 0;    ///< grid points with log ratio < -1e-12 (1 + |terms|)
  bool holds() const { return violations == 0; }
  nlohmann::json to_json() const;
};

/// Pointwise check of g(phi + tau) g(phi - tau) >= e^{-C b^2} g(phi)^2 with
/// g = exp(-H), H the sum of V(grad phi) over energy edges. Interior values run
/// over a product grid of n_per_axis points in +-8 sd, sd_i = sqrt(G(i,i) /
/// lambda); tau is box-sized and applied on the whole closure. At most 6
/// interior vertices.
PerturbationReport density_perturbation_check(const potential::Potential& p, const Domain& d,
                                              const std::vector<double>& tau, double b,
                                              int n_per_axis);

struct RatioCheck {
  double t = 1.0;
  double C = 1.0;
  double worst_deficit = 0.0;  ///< max of 1 - f(a+b) f(a-b) / (e^{-C b^2/t^2} f(a)^2)
  double worst_a = 0.0, worst_b = 0.0;
  double tolerance = 1e-9;
  bool pass() const { return worst_deficit <= tolerance; }
  nlohmann::json to_json() const;
};

/// Checks f(a + b) f(a - b) >= e^{-C b^2 / t^2} f(a)^2 over all grid pairs with
/// f(a) > 0 and shifts b in [0, 2 pi). Requires a grid of at least 512 points.
RatioCheck check_ratio_condition(const CircleDensity& f, double t, double C);

struct CharIntegral {
  std::complex<double> value;
  double quad_error = 0.0;  ///< |full grid - every other point|
};

CharIntegral char_integral(const CircleDensity& f);

struct CertifiedBound {
  double t = 1.0, C = 1.0;
  int m = 1;
  double bound = 0.0;          ///< 1 - e^{-2C/t^2} + pi/(2m)
  double discretization = 0.0; ///< pi / (2m)
  double rigorous = 0.0;       ///< tanh(C pi^2 / (4 t^2)) + pi/(2m)
  double data_bound = 0.0;     ///< sum_k |p_k - p_{k+m}| + pi/(2m)
  double arc_ratio = 0.0;      ///< observed max / min arc mass
  double arc_factor = 0.0;     ///< e^{2C/t^2}
  double arc_factor_rigorous = 0.0;  ///< e^{C pi^2 / (2 t^2)}
  std::vector<double> arc_mass;
  double integral_abs = 0.0;
  double quad_error = 0.0;
  bool holds = false;          ///< |integral| <= bound + quad_error
  nlohmann::json to_json() const;
};

/// Partition of the circle into 2m arcs of length pi/m. Throws
/// std::invalid_argument if f fails the ratio condition or m < t^2 / C.
CertifiedBound certified_bound(const CircleDensity& f, double t, double C, int m);

/// Wrapped Gaussian at the largest passing precision kappa = C / t^2, per t.
struct SweepRow {
  double t = 0.0;
  double kappa = 0.0;
  double integral = 0.0;
  CertifiedBound bound;
};
std::vector<SweepRow> wrapped_gaussian_sweep(const std::vector<double>& t_grid, double C, int m,
                                             std::size_t M = 4096);

}  // namespace gradlab::mermin
