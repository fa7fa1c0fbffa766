#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <span>
#include <vector>

#include <json.hpp>

#include "gradlab/lattice.hpp"

namespace gradlab::elliptic {

using lattice::Domain;

struct SolveOptions {
  double tol = 1e-10;  ///< relative residual ||b - Au|| / ||b||
  long max_iter = 0;   ///< 0 selects 20 * unknowns + 200
};

/// Tolerance used where sums of many solutions must stay accurate to 1e-10.
inline constexpr double kTightTol = 1e-13;

struct SolveResult {
  std::vector<double> u;  ///< on the domain box; 0 outside the closure
  long iterations = 0;
  double residual = 0.0;
};

/// Edge conductances on the domain box: cx[i] belongs to the edge
/// (i, i + e1) and cy[i] to (i, i + e2). Empty means unit conductance.
struct Conductance {
  std::vector<double> cx;
  std::vector<double> cy;
  bool empty() const { return cx.empty(); }
};

/// Preconditioned conjugate gradient on compressed vectors.
/// apply(x, y) sets y = A x; diag is the Jacobi preconditioner.
/// Throws std::runtime_error on non-convergence.
long pcg(const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
         const std::vector<double>& diag, const std::vector<double>& b, std::vector<double>& x,
         const SolveOptions& opt, double* residual = nullptr);

/// Solve (grad^T a grad u)(x) = rhs(x) at interior x with u = g on the
/// boundary. g and rhs are box-sized; an empty span means zero.
SolveResult solve_dirichlet(const Domain& d, std::span<const double> g,
                            std::span<const double> rhs, const Conductance* a = nullptr,
                            const SolveOptions& opt = {});

/// Apply grad^T a grad to a box vector at interior sites (other entries 0).
std::vector<double> apply_operator(const Domain& d, std::span<const double> u,
                                   const Conductance* a = nullptr);

/// Column G(x, .) of the Dirichlet Green function (zero on the boundary).
std::vector<double> green_column(const Domain& d, Vertex x, const SolveOptions& opt = {});

struct GreenTable {
  std::vector<Vertex> sources;
  std::vector<std::vector<double>> columns;  ///< box-sized
  double operator()(const Domain& d, std::size_t source, Vertex y) const {
    return columns[source][d.index(y)];
  }
};

GreenTable green_table(const Domain& d, const std::vector<Vertex>& sources,
                       const SolveOptions& opt = {});

/// rho^T G rho for a box-sized rho (only interior entries contribute).
double quadratic_form(const Domain& d, std::span<const double> rho, const SolveOptions& opt = {});

enum class HarmonicMethod { automatic, indicator, row };

/// Harmonic measure a_D(v, .) on the boundary of d, seen from interior v.
/// The indicator method solves one Dirichlet problem per boundary vertex; the
/// row method solves for G(v, .) and sums it over interior neighbours of each
/// boundary vertex. automatic picks indicator when |boundary| <= threshold.
lattice::SiteWeights harmonic_measure(const Domain& d, Vertex v,
                                      HarmonicMethod method = HarmonicMethod::automatic,
                                      std::size_t threshold = 512,
                                      double tol = kTightTol);

/// Harmonic extension of box-sized boundary data.
std::vector<double> harmonic_extension(const Domain& d, std::span<const double> g,
                                       const SolveOptions& opt = {});

/// ||grad u||_{L^2} where grad^T grad u = f, u = 0 on the boundary.
double h_minus_one_norm(const Domain& d, std::span<const double> f,
                        const SolveOptions& opt = {});

/// (1/lambda) rho^T G rho: Brascamp-Lieb variance bound for sum rho(x) phi(x).
double bl_bound_linear(const Domain& d, std::span<const double> rho, double lambda,
                       const SolveOptions& opt = {});

/// Domain of the level-m triadic cube (side 3^m, Dirichlet ring outside).
Domain cube_domain(const lattice::TriadicCube& q);

struct PoincareReport {
  int m = 0;
  double lhs = 0.0;            ///< volume-normalized H^{-1} norm
  double l2_term = 0.0;        ///< volume-normalized L^2 norm
  std::vector<double> scale_terms;  ///< 3^n * (mean squared cell average)^(1/2), n < m
  double rhs = 0.0;            ///< l2_term + sum of scale_terms
  double C = 0.0;              ///< lhs / rhs, 0 when both vanish
  nlohmann::json to_json() const;
};

/// The level-m cube centred at 0 as interior, with the surrounding ring as
/// zero Dirichlet boundary.
Domain poincare_domain(int m);

/// f is box-sized on poincare_domain(m); only cube entries are read.
PoincareReport multiscale_poincare_check(std::span<const double> f, int m);

struct OscillationReport {
  int m = 0;
  double oscillation = 0.0;    ///< ||u - mean u||, volume-normalized L^2
  double gradient_norm = 0.0;  ///< volume-normalized H^{-1} norm of grad u
  double C = 0.0;
  nlohmann::json to_json() const;
};

/// u is box-sized on poincare_domain(m); only cube entries are read.
OscillationReport l2_oscillation_vs_gradient(std::span<const double> u, int m);

/// Random test functions on the level-m cube, cycling through the families
/// gaussian noise, constant, low sine mode, checkerboard, point mass and
/// piecewise constant on random-level cells.
std::vector<double> random_cube_function(int m, int trial, std::uint64_t seed);
const char* random_family_name(int trial);

struct PoincareSuiteEntry {
  int m = 0;
  int trial = 0;
  std::string family;
  PoincareReport poincare;
  OscillationReport oscillation;
};

struct PoincareSuiteReport {
  std::vector<PoincareSuiteEntry> entries;
  double max_C_poincare = 0.0;
  double max_C_oscillation = 0.0;
  /// Entries whose constants exceed the given ones.
  std::size_t violations(double C_poincare, double C_oscillation) const;
  nlohmann::json to_json() const;
};

/// Both checks on `trials` random functions for every m in [1, m_max].
PoincareSuiteReport poincare_suite(int m_max, int trials, std::uint64_t seed);

}  // namespace gradlab::elliptic
