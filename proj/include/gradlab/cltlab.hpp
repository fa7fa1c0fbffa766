#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradlab/lattice.hpp"
#include "gradlab/multiscale.hpp"
#include "gradlab/potential.hpp"
#include "gradlab/sampler.hpp"
#include "gradlab/stats.hpp"

namespace gradlab::cltlab {

using Complex = std::complex<double>;

enum class Scaling { raw, sqrt_log_N };

/// Psi(t) = <exp(i t scale x)> with per-point standard errors sd / sqrt(ess).
struct CharFnEstimate {
  std::vector<double> t;
  std::vector<Complex> values;
  std::vector<double> se_re;
  std::vector<double> se_im;
  double scale = 1.0;
  double n_eff = 0.0;
  std::size_t n = 0;
  /// Largest |Im Psi(t)| / se_im (0 where se_im vanishes).
  double max_imag_z() const;
  nlohmann::json to_json() const;
};

CharFnEstimate char_fn(std::span<const double> x, double ess, const std::vector<double>& t_grid,
                       double scale = 1.0);
/// Uses the phi(centre) series of the batch; sqrt_log_N divides by sqrt(log N)
/// with N the half-width of the batch domain.
CharFnEstimate char_fn(const sampler::SampleBatch& batch, const std::vector<double>& t_grid,
                       Scaling scaling);

enum class DensityMethod { histogram, kde };

struct EmpiricalDensity {
  DensityMethod method = DensityMethod::histogram;
  std::vector<double> grid;     ///< bin centres or evaluation points
  std::vector<double> density;
  double width = 0.0;           ///< bin width or kernel bandwidth
  std::size_t n = 0;
  double integral() const;      ///< sum of density * bin width, trapezoid for kde
  nlohmann::json to_json() const;
};

/// Histogram with Freedman-Diaconis bin width 2 IQR n^{-1/3} (bin_width <= 0).
EmpiricalDensity histogram_density(std::span<const double> x, double bin_width = 0.0);
/// Gaussian kernel estimate with bandwidth 1.06 sd n^{-1/5} (bandwidth <= 0),
/// on `points` evenly spaced points covering the data +- 6 bandwidths.
EmpiricalDensity kde_density(std::span<const double> x, double bandwidth = 0.0,
                             std::size_t points = 512);

/// Centred Gaussian with variance g; the probability-normalized limit law.
struct GaussianReference {
  double g = 1.0;
  std::string source = "given";
  double density(double x) const;
  double charfn(double t) const;  ///< exp(-g t^2 / 2)
  nlohmann::json to_json() const;
};

/// g from the slope of Var(phi(0)) against log N (weighted least squares);
/// with one point, Var / log N.
GaussianReference fit_reference(const std::vector<int>& N, const std::vector<double>& var,
                                const std::vector<double>& se);

struct GapOptions {
  DensityMethod method = DensityMethod::histogram;
  int bootstrap = 200;
  std::uint64_t seed = 0;
};

struct CltGap {
  double sup_gap = 0.0;
  EmpiricalDensity density;
  std::vector<double> reference;  ///< reference density on density.grid
  double band_lo = 0.0;           ///< bootstrap 2.5% quantile of the sup gap
  double band_hi = 0.0;           ///< bootstrap 97.5% quantile
  double null_hi = 0.0;           ///< 99% quantile of the sup gap for data drawn from the reference
  nlohmann::json to_json() const;
};

/// sup_x |g_N(x) - reference density| over the density grid; x holds
/// phi(0) / sqrt(log N).
CltGap clt_gap(std::span<const double> x, const GaussianReference& ref, const GapOptions& opt);

struct RegimeSplit {
  double a = 0.0;
  double eps = 0.0;
  double cut = 0.0;  ///< eps sqrt(log N)
  double I_small = 0.0, I_mid = 0.0, I_large = 0.0;
  double quad_err[3] = {0, 0, 0};  ///< |trapezoid - Simpson| per part
  double mc_err[3] = {0, 0, 0};    ///< integrated standard errors per part
  nlohmann::json to_json() const;
};

/// Integrals over the estimate's t grid (which must be symmetric or t >= 0, in
/// which case it is mirrored) of |Psi - exp(-g t^2/2)| on |t| <= a and on
/// a <= |t| <= eps sqrt(log N), and of |Psi| beyond.
RegimeSplit regime_split(const CharFnEstimate& cf, const GaussianReference& ref, double a, double eps,
                         double log_N);

struct FactorOptions {
  int N = 64;
  int k = 1;
  double gamma = 0.5;
  double r_min = 8.0;
  std::vector<double> s_grid{0.1, 0.2, 0.4};
  std::size_t samples = 4000;        ///< mu_N samples
  std::size_t inner_samples = 4000;  ///< zero-boundary ball samples
  std::uint64_t seed = 0;
  sampler::SweepKind kind = sampler::SweepKind::multigrid;
  unsigned threads = 1;
};

struct FactorPoint {
  double s = 0.0;
  Complex lhs, outer, inner, rhs;
  double diff_re = 0.0;    ///< Re(lhs - rhs)
  double diff_im = 0.0;
  double se = 0.0;         ///< combined standard error of diff_re
  double gaussian_diff = 0.0;  ///< exact Gaussian lhs - rhs at the same geometry
  double z = 0.0;          ///< (diff_re - gaussian_diff) / se
};

struct FactorReport {
  int N = 0, k = 0;
  double var_lhs_gauss = 0.0, var_outer_gauss = 0.0, var_inner_gauss = 0.0;
  std::vector<FactorPoint> points;
  nlohmann::json to_json() const;
};

/// <exp(i s X_{r_k})>_N against <exp(i s X_{r_{k-1}})>_N E^{r_{k-1},0}[exp(i s A_{k-1})].
/// X windows reaching outside Q_N read the zero extension. Requires k >= 1 and
/// s^2 < 1/2.
FactorReport factorization_check(const potential::Potential& p, const FactorOptions& opt);

/// The Gaussian (quadratic V) variances entering the factorization.
struct GaussianFactorVariances {
  double lhs = 0.0, outer = 0.0, inner = 0.0;
};
GaussianFactorVariances gaussian_factor_variances(int N, int k, double gamma, double r_min);

struct MwPoint {
  double s = 0.0;
  double modulus = 0.0;  ///< |<exp(i s phi(0))>|
  double se = 0.0;
  double root = 0.0;     ///< lower confidence modulus^(1/log N)
};

struct MwReport {
  double log_N = 0.0;
  double s_min = 0.0;
  double eps1 = 0.0;  ///< largest eps1 with the bound on |s| >= s_min
  double C = 0.0;     ///< smallest C with the bound on |s| >= s_min
  std::vector<MwPoint> points;
  nlohmann::json to_json() const;
};

/// Fits eps1 and C in |<e^{i s phi(0)}>| <= min{1 - eps1, C / s^2}^{log N}
/// using the lower 3 SE confidence limit of the modulus; points with |s| <
/// s_min are reported but not fitted (the bound fails at s = 0).
MwReport mw_char_probe(std::span<const double> phi0, double ess, double log_N,
                       const std::vector<double>& s_grid, double s_min = 0.5);

struct BlExpPoint {
  double t = 0.0;
  double log_mgf = 0.0;
  double se = 0.0;
  double bound = 0.0;
  bool violation = false;
  bool dropped = false;  ///< exponent overflow
};

struct BlExpReport {
  double quadratic = 0.0;  ///< f^T G f
  double lambda = 1.0;
  std::vector<BlExpPoint> points;
  bool any_violation() const;
  nlohmann::json to_json() const;
};

/// log <exp(t X)> against (t^2 / 2 lambda) f^T G f, for samples x of X = sum f phi.
BlExpReport bl_exp_probe(std::span<const double> x, double ess, double fGf,
                         const std::vector<double>& t_grid, double lambda);

struct TailReport {
  double R = 0.0;
  std::size_t count = 0;
  std::size_t n = 0;
  double frequency = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  nlohmann::json to_json() const;
};

/// Frequency of max |phi| >= (log R)^2 over the batch configurations.
TailReport tail_event_probe(const sampler::SampleBatch& batch, double R);
TailReport tail_event_probe(std::span<const double> max_abs, double R);

const char* to_string(DensityMethod m);

}  // namespace gradlab::cltlab
