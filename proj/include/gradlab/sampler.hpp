#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradlab/lattice.hpp"
#include "gradlab/potential.hpp"
#include "gradlab/stats.hpp"

namespace gradlab::sampler {

using lattice::Domain;
using lattice::DomainPtr;
using lattice::FieldConfig;
using potential::Potential;

/// Dirichlet data on the boundary sites of a domain (box-sized storage).
struct BoundaryCondition {
  enum class Kind { zero, explicit_values };
  Kind kind = Kind::zero;
  std::vector<double> values;

  static BoundaryCondition zero(const Domain& d);
  static BoundaryCondition from_function(const Domain& d, const std::function<double(Vertex)>& f);
  double max_abs() const;
};

enum class SweepKind {
  heat_bath,  ///< checkerboard single-site heat bath
  multigrid,  ///< heat bath followed by exact collective moves along hat functions
};

struct ChainState {
  FieldConfig field;
  std::uint64_t sweep_count = 0;
  stats::Rng rng;
};

/// Chain started from the harmonic extension of the boundary data.
ChainState initial_state(DomainPtr d, const BoundaryCondition& bc, std::uint64_t seed,
                         std::uint64_t stream = 0);

/// One checkerboard sweep: every interior site is redrawn exactly from its
/// conditional law given its neighbours (even parity first).
void heat_bath_sweep(ChainState& s, const Potential& p);

/// One pass of collective moves: for hat functions psi of half-width
/// b = 2, 4, ... (grid shifted at random), t is drawn exactly from the
/// density proportional to exp(-H(phi + t psi)) and phi += t psi.
void collective_sweep(ChainState& s, const Potential& p);

/// One unit of chain time for the given kind.
void sweep(ChainState& s, const Potential& p, SweepKind kind);

/// Exact draw from the log-concave density exp(-h) on R, where h'' >= kappa.
/// eval(t) returns {h(t), h'(t), h''(t)}; t0 is a starting guess.
/// Throws after max_proposals rejections.
double sample_log_concave(const std::function<potential::Derivs(double)>& eval, double kappa,
                          double t0, stats::Rng& rng, long max_proposals = 1000000);

using Observable = std::function<double(const FieldConfig&)>;

/// Observable evaluating a fixed linear functional of the field.
Observable linear_observable(const lattice::SiteWeights& w, const Domain& d,
                             lattice::Extension ext = lattice::Extension::strict);

struct SamplerOptions {
  std::size_t n_samples = 1;
  long burn_in = -1;   ///< -1: 20 N^2 sweeps for heat_bath
  long thinning = -1;  ///< -1: N^2 / 4 sweeps for heat_bath
  std::uint64_t seed = 0;
  SweepKind kind = SweepKind::heat_bath;
  unsigned chains = 1;
  unsigned threads = 1;  ///< 0 reads GRADLAB_THREADS
  bool keep_configs = true;
  std::vector<Observable> observables;  ///< recorded per sample in addition to phi(center)
  std::vector<std::string> observable_names;
};

struct SampleBatch {
  DomainPtr domain;
  std::vector<FieldConfig> configs;
  /// series[0] is phi at the domain centre; series[1 + j] is observable j.
  std::vector<std::vector<double>> series;
  std::vector<std::string> names;
  std::vector<double> ess;  ///< per series
  std::vector<std::size_t> chain_lengths;
  long burn_in = 0;
  long thinning = 0;
  std::uint64_t seed = 0;
  SweepKind kind = SweepKind::heat_bath;
  bool exact = false;
  std::size_t size() const { return series.empty() ? 0 : series[0].size(); }
  nlohmann::json summary() const;
};

/// Default burn-in and thinning for a domain under the given sweep kind.
long default_burn_in(const Domain& d, SweepKind kind);
long default_thinning(const Domain& d, SweepKind kind);

SampleBatch sample_batch(DomainPtr d, const BoundaryCondition& bc, const Potential& p,
                         const SamplerOptions& opt);

/// Independent exact draws from the Gaussian (quadratic V) measure via a
/// sparse Cholesky factor of the Dirichlet Laplacian. Burn-in, thinning, kind
/// and chains in opt are ignored.
SampleBatch exact_gaussian_sample(DomainPtr d, const BoundaryCondition& bc,
                                  const SamplerOptions& opt);

double max_abs_field(const FieldConfig& f);
/// Indicator of max |phi| < (log R)^2.
bool event_M_indicator(const FieldConfig& f, double R);

/// Number of worker threads from GRADLAB_THREADS (default 1).
unsigned threads_from_env();

const char* to_string(SweepKind k);
SweepKind sweep_kind_from_string(const std::string& s);

}  // namespace gradlab::sampler
