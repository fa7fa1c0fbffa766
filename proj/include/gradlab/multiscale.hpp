#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <json.hpp>

#include "gradlab/lattice.hpp"
#include "gradlab/potential.hpp"
#include "gradlab/sampler.hpp"

namespace gradlab::multiscale {

using lattice::Domain;
using lattice::Extension;
using lattice::FieldConfig;
using lattice::SiteWeights;

/// r_k = e^{-k} N together with r_{k,+-} = (1 +- r_k^{-gamma}) r_k.
struct Scale {
  int k = 0;
  double r = 0.0;
  double r_plus = 0.0;
  double r_minus = 0.0;
};

struct ScaleLadder {
  int N = 0;
  double gamma = 0.5;
  double r_min = 8.0;
  int k_max = 0;  ///< last k with r_k >= r_min
  std::vector<Scale> scales;  ///< k = 0 .. k_max

  double r(int k) const;
  Scale scale(int k) const;
  nlohmann::json to_json() const;
};

ScaleLadder make_ladder(int N, double gamma = 0.5, double r_min = 8.0);

enum class WindowKind { center, plus, minus };

/// Integer radii averaged by X at one scale: |r - r_*| <= r_k^{-gamma} r_* / 4
/// around r_* in {r_k, r_{k,+}, r_{k,-}}.
struct Window {
  int k = 0;
  WindowKind kind = WindowKind::center;
  double center_radius = 0.0;
  double half_width = 0.0;
  std::vector<int> radii;
  double nominal_weight = 0.0;  ///< (r_k^{1-gamma} / 2)^{-1}
  double weight = 0.0;          ///< 1 / radii.size(), the weight actually used
  bool fallback = false;        ///< no integer radius in range; nearest radius used
  nlohmann::json to_json() const;
};

Window window(const ScaleLadder& ladder, int k, WindowKind kind);

/// Harmonic measure of B_R(0) seen from 0, cached by ceil(R^2) (which
/// determines the lattice ball). Thread-safe.
const SiteWeights& circle_weights(double R);

/// C_R(v, phi): harmonic-measure average of phi over the boundary of B_R(v).
double circle_average(const FieldConfig& f, Vertex v, double R,
                      Extension ext = Extension::strict);

/// Window-averaged circle weights, centred at the origin.
SiteWeights window_weights(const Window& w);

struct HarmonicAverageSample {
  int k = 0;
  double X = 0.0;        ///< X_{r_k}
  double X_plus = 0.0;   ///< X_{r_{k,+}}
  double X_minus = 0.0;  ///< X_{r_{k,-}}
  double X_next = 0.0;   ///< X_{r_{k+1}}
  double A = 0.0;        ///< X_{r_{k+1}} - X_{r_{k,-}}
  double E = 0.0;        ///< X_{r_k} - X_{r_{k,-}}
};

/// X, A_k and E_k at one scale, compiled against a domain for repeated use.
class XProcess {
 public:
  XProcess(const ScaleLadder& ladder, int k, const Domain& d, Vertex v,
           Extension ext = Extension::strict);
  HarmonicAverageSample operator()(const FieldConfig& f) const;
  const std::vector<Window>& windows() const { return windows_; }  ///< center, plus, minus, next
  bool any_fallback() const;
  /// Linear weights (centred at v) of X_{r_k}, X_{r_{k,+}}, X_{r_{k,-}}, X_{r_{k+1}}.
  const std::vector<SiteWeights>& weights() const { return weights_; }

 private:
  int k_ = 0;
  std::vector<Window> windows_;
  std::vector<SiteWeights> weights_;
  std::vector<lattice::CompiledWeights> compiled_;
};

HarmonicAverageSample x_process(const FieldConfig& f, Vertex v, int k, const ScaleLadder& ladder,
                                Extension ext = Extension::strict);

/// rho_{r_k}(v, .): the signed weights with A_k(v, phi) = sum_y rho(v, y) phi(y).
struct AnnulusWeights {
  Vertex center{};
  int k = 0;
  SiteWeights weights;
  double positive_mass = 0.0;
  double negative_mass = 0.0;
  nlohmann::json to_json() const;
};

AnnulusWeights rho_weights(Vertex v, int k, const ScaleLadder& ladder);

struct AnnihilationReport {
  int trials = 0;
  double constant_residual = 0.0;  ///< |sum rho| for h = 1
  double linear_residual = 0.0;    ///< worst of h = y_1 - v_1, h = y_2 - v_2 (normalized)
  double max_residual = 0.0;       ///< max over random h of |sum rho h| / (|rho|_1 |h|_inf)
  double tolerance = 1e-8;
  bool pass() const { return max_residual <= tolerance && linear_residual <= tolerance; }
  nlohmann::json to_json() const;
};

/// Tests rho against harmonic extensions of uniform random boundary data on
/// B_{r_k}(v).
AnnihilationReport check_harmonic_annihilation(const AnnulusWeights& rho, const ScaleLadder& ladder,
                                               int trials, std::uint64_t seed);

struct CouplingOptions {
  std::size_t n_samples = 2000;
  std::uint64_t seed = 0;
  sampler::SweepKind kind = sampler::SweepKind::multigrid;
  unsigned threads = 1;
  int bootstrap = 1000;
};

struct CouplingReport {
  int k = 0;
  double radius = 0.0;
  double max_abs_f = 0.0;
  double hypothesis_bound = 0.0;  ///< 2 (log r_k)^2
  std::size_t n = 0;
  double mean_f = 0.0, mean_0 = 0.0;
  double var_f = 0.0, var_0 = 0.0;
  double ks = 0.0;
  double p_value = 0.0;  ///< pooled bootstrap
  nlohmann::json to_json() const;
};

/// Samples A_k(v, .) on B_{r_k}(v) under boundary data f and under zero data
/// (independent ensembles) and compares the two laws. Throws if
/// max |f| > 2 (log r_k)^2.
CouplingReport coupling_probe(const ScaleLadder& ladder, int k, Vertex v,
                              const std::function<double(Vertex)>& f,
                              const potential::Potential& p, const CouplingOptions& opt);

const char* to_string(WindowKind k);

}  // namespace gradlab::multiscale
