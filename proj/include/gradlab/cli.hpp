#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradlab/potential.hpp"

namespace gradlab::cli {

inline constexpr const char* kVersion = "gradlab 1.0.0";

/// Fully resolved run configuration; every field has an explicit value after
/// parsing.
struct ExperimentConfig {
  std::string subcommand;
  std::string potential = "quadratic";
  double eps = 0.0;
  int n = 16;
  std::vector<int> n_ref;   ///< extra sizes for the variance-slope reference (clt)
  double gamma = 0.5;
  double r_min = 8.0;
  int k = 1;
  long samples = 1000;
  long burnin = -1;          ///< -1: sampler default
  long thin = -1;            ///< -1: sampler default
  std::string sweep = "multigrid";
  bool exact = false;        ///< exact Gaussian draws (quadratic only)
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out = "gradlab_out";
  double tmax = 3.0;
  int t_points = 61;
  std::string scaling = "sqrt_log_N";
  std::string density = "histogram";
  int bootstrap = 200;
  std::vector<int> levels{2, 3, 4};
  std::vector<double> t_grid{2.0, 4.0, 8.0};
  double C = 1.0;
  int arcs = 64;             ///< m: half the number of circle arcs
  int quadrature = 100;      ///< grid points per axis for the perturbation check
  int m = 3;
  int trials = 50;
  std::vector<double> s_grid;  ///< empty: subcommand default
  long inner_samples = 4000;

  nlohmann::json to_json() const;
  potential::Potential make_potential() const;
};

struct ParseOutcome {
  bool ok = false;
  int exit_code = 0;     ///< meaningful when !ok (0 for --help)
  std::string message;   ///< usage or error text
  ExperimentConfig config;
};

/// Flags override values from --config (key = value lines, [subcommand]
/// sections); unknown keys are rejected.
ParseOutcome parse_config(int argc, const char* const* argv);

/// Runs the subcommand; files go into config.out. Returns 0, or throws
/// std::runtime_error with the failing stage in the message.
int run(const ExperimentConfig& config, std::ostream& log);

/// Parse, run and map failures to exit codes 0 / 1 / 2.
int main_entry(int argc, const char* const* argv);

}  // namespace gradlab::cli
