#include "gradlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "gradlab/cltlab.hpp"
#include "gradlab/elliptic.hpp"
#include "gradlab/homogenize.hpp"
#include "gradlab/io.hpp"
#include "gradlab/lattice.hpp"
#include "gradlab/mermin.hpp"
#include "gradlab/sampler.hpp"

namespace gradlab::cli {

namespace fs = std::filesystem;

nlohmann::json ExperimentConfig::to_json() const {
  return {{"subcommand", subcommand},
          {"potential", potential},
          {"eps", eps},
          {"n", n},
          {"n_ref", n_ref},
          {"gamma", gamma},
          {"r_min", r_min},
          {"k", k},
          {"samples", samples},
          {"burnin", burnin},
          {"thin", thin},
          {"sweep", sweep},
          {"exact", exact},
          {"seed", seed},
          {"threads", threads},
          {"out", out},
          {"tmax", tmax},
          {"t_points", t_points},
          {"scaling", scaling},
          {"density", density},
          {"bootstrap", bootstrap},
          {"levels", levels},
          {"t_grid", t_grid},
          {"C", C},
          {"arcs", arcs},
          {"quadrature", quadrature},
          {"m", m},
          {"trials", trials},
          {"s_grid", s_grid},
          {"inner_samples", inner_samples}};
}

potential::Potential ExperimentConfig::make_potential() const {
  if (potential == "quadratic") return potential::quadratic();
  if (potential == "cos_perturbed") return potential::cos_perturbed(eps);
  throw std::invalid_argument("unknown potential '" + potential + "'");
}

namespace {

const char* kSubcommands[] = {"sample", "clt", "charfn", "homog", "mw", "poincare", "decouple"};

struct Bound {
  CLI::Option* eps = nullptr;
  CLI::Option* threads = nullptr;
};

/// Options shared by every subcommand are registered on each so that
/// `gradlab <sub> --flag` and `[sub]` config sections both work.
Bound add_options(CLI::App* sub, ExperimentConfig& c) {
  Bound b;
  sub->add_option("--potential", c.potential, "quadratic or cos_perturbed")
      ->check(CLI::IsMember({"quadratic", "cos_perturbed"}))
      ->capture_default_str();
  b.eps = sub->add_option("--eps", c.eps, "cos_perturbed amplitude in (0, 1), 0.5 when omitted");
  sub->add_option("--n", c.n, "half width N of Q_N")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--n-ref", c.n_ref, "extra N values for the variance-slope fit")->delimiter(',');
  sub->add_option("--gamma", c.gamma, "scale ladder exponent")->capture_default_str();
  sub->add_option("--r-min", c.r_min, "smallest ladder radius")->capture_default_str();
  sub->add_option("--k", c.k, "ladder level")->capture_default_str();
  sub->add_option("--samples", c.samples, "number of samples")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--burnin", c.burnin, "burn-in sweeps (-1: default)")->capture_default_str();
  sub->add_option("--thin", c.thin, "thinning sweeps (-1: default)")->capture_default_str();
  sub->add_option("--sweep", c.sweep, "heat_bath or multigrid")
      ->check(CLI::IsMember({"heat_bath", "multigrid"}))
      ->capture_default_str();
  sub->add_flag("--exact", c.exact, "exact Gaussian draws (quadratic only)");
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  b.threads = sub->add_option("--threads", c.threads, "worker threads (default GRADLAB_THREADS or 1)");
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  return b;
}

struct Stage {
  std::string name;
  nlohmann::json info;
};

struct RunContext {
  const ExperimentConfig& cfg;
  std::ostream& log;
  fs::path dir;
  nlohmann::json provenance;
  std::vector<Stage> stages;
  std::vector<std::string> warnings;
  std::vector<std::string> files;

  template <class F>
  auto stage(const std::string& name, F&& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      throw std::runtime_error(name + ": " + e.what());
    }
  }
  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows) {
    io::write_csv(dir / name, provenance, header, rows);
    files.push_back(name);
  }
  void json(const std::string& name, const nlohmann::json& result) {
    io::write_json(dir / name, provenance, result);
    files.push_back(name);
  }
};

sampler::SamplerOptions sampler_options(const ExperimentConfig& c, std::size_t n, std::uint64_t seed) {
  sampler::SamplerOptions so;
  so.n_samples = n;
  so.burn_in = c.burnin;
  so.thinning = c.thin;
  so.seed = seed;
  so.kind = sampler::sweep_kind_from_string(c.sweep);
  so.threads = c.threads;
  so.chains = c.threads;
  return so;
}

sampler::SampleBatch draw(RunContext& ctx, int N, std::uint64_t seed, bool keep) {
  const auto& c = ctx.cfg;
  const auto pot = c.make_potential();
  auto d = std::make_shared<const lattice::Domain>(lattice::build_square(N));
  auto so = sampler_options(c, std::size_t(c.samples), seed);
  so.keep_configs = keep;
  const auto bc = sampler::BoundaryCondition::zero(*d);
  auto batch = ctx.stage("sampling N=" + std::to_string(N), [&] {
    return c.exact ? sampler::exact_gaussian_sample(d, bc, so) : sampler::sample_batch(d, bc, pot, so);
  });
  ctx.stages.push_back({"sampling N=" + std::to_string(N), batch.summary()});
  if (!batch.ess.empty() && batch.ess[0] < 10.0)
    ctx.warnings.push_back("low effective sample size at N=" + std::to_string(N));
  return batch;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  if (n == 1) return {a};
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * double(i) / double(n - 1));
  return out;
}

int run_sample(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const auto batch = draw(ctx, c.n, c.seed, true);
  ctx.stage("writing snapshot", [&] {
    io::write_snapshot(ctx.dir / "sample.grdf", batch.configs);
    io::write_json(ctx.dir / "sample.grdf.json", ctx.provenance,
                   {{"format", "GRDF"}, {"version", io::kSnapshotVersion}, {"N", c.n},
                    {"count", batch.configs.size()}, {"domain", batch.domain->descriptor()}});
    return 0;
  });
  ctx.files.push_back("sample.grdf");
  ctx.files.push_back("sample.grdf.json");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < batch.size(); ++i) rows.push_back({double(i), batch.series[0][i]});
  ctx.csv("sample_series.csv", {"index", "phi0"}, rows);
  const auto est = stats::variance_estimate(batch.series[0], batch.ess[0]);
  const auto mean = stats::mean_estimate(batch.series[0], batch.ess[0]);
  nlohmann::json summary = batch.summary();
  summary["mean_phi0"] = {mean.value, mean.se};
  summary["var_phi0"] = {est.value, est.se};
  ctx.json("sample_summary.json", summary);
  return 0;
}

int run_clt(RunContext& ctx) {
  const auto& c = ctx.cfg;
  std::vector<int> Ns = c.n_ref;
  Ns.push_back(c.n);
  std::vector<double> var, se;
  std::vector<double> phi0;
  double ess0 = 0.0;
  for (std::size_t j = 0; j < Ns.size(); ++j) {
    const auto batch = draw(ctx, Ns[j], c.seed + 7919u * j, false);
    const auto est = stats::variance_estimate(batch.series[0], batch.ess[0]);
    var.push_back(est.value);
    se.push_back(est.se);
    if (j + 1 == Ns.size()) {
      phi0 = batch.series[0];
      ess0 = batch.ess[0];
    }
  }
  const double log_N = std::log(double(c.n));
  const auto ref = ctx.stage("reference fit", [&] { return cltlab::fit_reference(Ns, var, se); });
  std::vector<double> x(phi0.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = phi0[i] / std::sqrt(log_N);
  const auto cf = cltlab::char_fn(x, ess0, linspace(-c.tmax, c.tmax, c.t_points));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < cf.t.size(); ++i)
    rows.push_back({cf.t[i], cf.values[i].real(), cf.values[i].imag(), cf.se_re[i], cf.se_im[i]});
  ctx.csv("clt_charfn.csv", {"t", "re", "im", "se", "se_im"}, rows);

  cltlab::GapOptions go;
  go.method = c.density == "kde" ? cltlab::DensityMethod::kde : cltlab::DensityMethod::histogram;
  go.bootstrap = c.bootstrap;
  go.seed = c.seed;
  const auto gap = ctx.stage("density gap", [&] { return cltlab::clt_gap(x, ref, go); });
  rows.clear();
  for (std::size_t i = 0; i < gap.density.grid.size(); ++i)
    rows.push_back({gap.density.grid[i], gap.density.density[i], gap.reference[i]});
  ctx.csv("clt_density.csv", {"x", "density", "reference"}, rows);

  const std::vector<double> s_grid = c.s_grid.empty() ? std::vector<double>{0.5, 1.0, 1.5, 2.0, 3.0} : c.s_grid;
  const auto mw = ctx.stage("characteristic bound fit",
                            [&] { return cltlab::mw_char_probe(phi0, ess0, log_N, s_grid); });
  ctx.json("clt_summary.json", {{"g_hat", ref.g},
                                {"reference", ref.to_json()},
                                {"sup_gap", gap.sup_gap},
                                {"gap", gap.to_json()},
                                {"max_imag_z", cf.max_imag_z()},
                                {"eps1_fit", mw.eps1},
                                {"C_fit", mw.C},
                                {"mw", mw.to_json()}});
  return 0;
}

int run_charfn(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const auto batch = draw(ctx, c.n, c.seed, false);
  const auto scaling = c.scaling == "raw" ? cltlab::Scaling::raw : cltlab::Scaling::sqrt_log_N;
  const auto cf = cltlab::char_fn(batch, linspace(-c.tmax, c.tmax, c.t_points), scaling);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < cf.t.size(); ++i)
    rows.push_back({cf.t[i], cf.values[i].real(), cf.values[i].imag(), cf.se_re[i], cf.se_im[i]});
  ctx.csv("charfn.csv", {"t", "re", "im", "se", "se_im"}, rows);
  nlohmann::json summary = {{"scale", cf.scale}, {"n", cf.n}, {"n_eff", cf.n_eff}, {"max_imag_z", cf.max_imag_z()}};
  if (c.potential == "quadratic") {
    const auto col = elliptic::green_column(*batch.domain, {0, 0});
    summary["gaussian_G00"] = col[batch.domain->index({0, 0})];
  }
  ctx.json("charfn_summary.json", summary);
  return 0;
}

int run_homog(RunContext& ctx) {
  const auto& c = ctx.cfg;
  if (c.levels.empty()) throw std::invalid_argument("homog: empty level list");
  int top = 0;
  for (int l : c.levels) top = std::max(top, l);
  const int N = (lattice::pow3(top) - 1) / 2 + 1;
  const auto pot = c.make_potential();
  std::vector<homogenize::QuenchedCoefficient> ensemble;
  if (pot.kind() == potential::Potential::Kind::quadratic) {
    auto d = std::make_shared<const lattice::Domain>(lattice::build_square(N));
    for (long i = 0; i < std::max(2L, c.samples); ++i) ensemble.push_back(homogenize::QuenchedCoefficient::constant(d, 1.0));
  } else {
    const auto batch = draw(ctx, N, c.seed, true);
    for (const auto& f : batch.configs) ensemble.push_back(homogenize::QuenchedCoefficient::from_field(f, pot));
  }
  const auto flux = ctx.stage("flux concentration", [&] { return homogenize::flux_concentration(ensemble, c.levels); });
  const auto sub = ctx.stage("subadditivity", [&] {
    return homogenize::subadditivity_and_quadratic_check(ensemble.front(), c.levels, {});
  });
  const auto two = ctx.stage("two-scale expansion", [&] {
    return homogenize::two_scale_residual(ensemble.front(), c.levels, homogenize::sine_source());
  });
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < sub.levels.size(); ++i) {
    const auto& l = sub.levels[i];
    const double nu = homogenize::quenched_nu(ensemble.front(), {l.level, {0, 0}}, {1.0, 0.0});
    double fv = 0.0;
    for (const auto& fl : flux.levels)
      if (fl.level == l.level) fv = fl.total_variance;
    rows.push_back({double(l.level), 1.0, 0.0, nu, l.ahom[0][0], l.ahom[0][1], l.ahom[1][1], fv});
  }
  ctx.csv("homog.csv", {"level", "p_x", "p_y", "nu", "ahom_xx", "ahom_xy", "ahom_yy", "flux_var"}, rows);
  rows.clear();
  for (const auto& l : two.levels) rows.push_back({double(l.level), l.eps, l.homogenization, l.two_scale});
  ctx.csv("homog_twoscale.csv", {"level", "eps", "homogenization", "two_scale"}, rows);
  ctx.json("homog_summary.json", {{"subadditivity", sub.to_json()}, {"flux", flux.to_json()}, {"two_scale", two.to_json()}});
  return 0;
}

int run_mw(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const auto sweep = ctx.stage("circle density sweep",
                               [&] { return mermin::wrapped_gaussian_sweep(c.t_grid, c.C, c.arcs); });
  std::vector<std::vector<double>> rows;
  nlohmann::json detail = nlohmann::json::array();
  for (const auto& r : sweep) {
    rows.push_back({r.t, r.integral, r.bound.bound});
    nlohmann::json j = r.bound.to_json();
    j["kappa"] = r.kappa;
    detail.push_back(j);
    if (!r.bound.holds) ctx.warnings.push_back("bound exceeded at t=" + io::format_double(r.t));
  }
  ctx.csv("mw.csv", {"t", "integral", "bound"}, rows);
  const auto pot = c.make_potential();
  const auto path = lattice::Domain::from_interior({{-1, 0}, {0, 0}, {1, 0}});
  const auto tau = mermin::make_tau(1, 0.5, path);
  const auto pert = ctx.stage("perturbation check", [&] {
    return mermin::density_perturbation_check(pot, path, tau.values, tau.b, c.quadrature);
  });
  ctx.json("mw_summary.json", {{"sweep", detail}, {"tau", tau.to_json()}, {"perturbation", pert.to_json()}});
  return 0;
}

int run_poincare(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const auto suite = ctx.stage("poincare suite", [&] { return elliptic::poincare_suite(c.m, c.trials, c.seed); });
  std::vector<std::vector<double>> rows;
  for (const auto& e : suite.entries)
    rows.push_back({double(e.m), double(e.trial), e.poincare.lhs, e.poincare.rhs, e.poincare.C,
                    e.oscillation.oscillation, e.oscillation.gradient_norm, e.oscillation.C});
  ctx.csv("poincare.csv", {"m", "trial", "lhs", "rhs", "C", "oscillation", "gradient_norm", "C_oscillation"}, rows);
  ctx.json("poincare_summary.json",
           {{"max_C_poincare", suite.max_C_poincare}, {"max_C_oscillation", suite.max_C_oscillation},
            {"entries", suite.entries.size()}});
  return 0;
}

int run_decouple(RunContext& ctx) {
  const auto& c = ctx.cfg;
  cltlab::FactorOptions fo;
  fo.N = c.n;
  fo.k = c.k;
  fo.gamma = c.gamma;
  fo.r_min = c.r_min;
  if (!c.s_grid.empty()) fo.s_grid = c.s_grid;
  fo.samples = std::size_t(c.samples);
  fo.inner_samples = std::size_t(c.inner_samples);
  fo.seed = c.seed;
  fo.kind = sampler::sweep_kind_from_string(c.sweep);
  fo.threads = c.threads;
  const auto rep = ctx.stage("factorization", [&] { return cltlab::factorization_check(c.make_potential(), fo); });
  std::vector<std::vector<double>> rows;
  for (const auto& p : rep.points)
    rows.push_back({p.s, p.lhs.real(), p.lhs.imag(), p.rhs.real(), p.rhs.imag(), p.diff_re, p.se,
                    p.gaussian_diff, p.z});
  ctx.csv("decouple.csv", {"s", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "diff_re", "se", "gaussian_diff", "z"}, rows);
  ctx.json("decouple_summary.json", rep.to_json());
  return 0;
}

}  // namespace

ParseOutcome parse_config(int argc, const char* const* argv) {
  ParseOutcome out;
  ExperimentConfig& c = out.config;
  CLI::App app{"gradlab: gradient interface model laboratory", "gradlab"};
  app.set_config("--config", "", "key = value configuration file with [subcommand] sections");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::vector<std::pair<CLI::App*, Bound>> subs;
  for (const char* name : kSubcommands) {
    CLI::App* sub = app.add_subcommand(name, "");
    sub->allow_config_extras(CLI::config_extras_mode::error);
    subs.push_back({sub, add_options(sub, c)});
  }
  auto find = [&](const std::string& n) {
    for (auto& s : subs)
      if (s.first->get_name() == n) return s.first;
    return static_cast<CLI::App*>(nullptr);
  };
  find("sample")->description("draw configurations on Q_N and write a GRDF snapshot");
  find("clt")->description("local limit statistics of phi(0) / sqrt(log N)");
  find("charfn")->description("empirical characteristic function of phi(0)");
  find("homog")->description("quenched homogenization quantities over triadic levels");
  find("mw")->description("circle-density bound sweep and perturbation check");
  find("poincare")->description("multiscale Poincare and oscillation suites");
  find("decouple")->description("factorization of the characteristic function across scales");
  for (const char* name : {"clt", "charfn"}) {
    CLI::App* s = find(name);
    s->add_option("--tmax", c.tmax, "largest |t|")->capture_default_str();
    s->add_option("--t-points", c.t_points, "number of t values")->check(CLI::PositiveNumber)->capture_default_str();
  }
  find("charfn")->add_option("--scaling", c.scaling, "raw or sqrt_log_N")
      ->check(CLI::IsMember({"raw", "sqrt_log_N"}))
      ->capture_default_str();
  find("clt")->add_option("--density", c.density, "histogram or kde")
      ->check(CLI::IsMember({"histogram", "kde"}))
      ->capture_default_str();
  find("clt")->add_option("--bootstrap", c.bootstrap, "bootstrap replicates")->capture_default_str();
  for (const char* name : {"clt", "decouple"})
    find(name)->add_option("--s-grid", c.s_grid, "s values")->delimiter(',');
  find("homog")->add_option("--levels", c.levels, "triadic levels")->delimiter(',');
  find("mw")->add_option("--t-grid", c.t_grid, "t values")->delimiter(',');
  find("mw")->add_option("--C", c.C, "ratio-condition constant")->capture_default_str();
  find("mw")->add_option("--m", c.arcs, "half the number of circle arcs")->capture_default_str();
  find("mw")->add_option("--quadrature", c.quadrature, "grid points per axis")->capture_default_str();
  find("poincare")->add_option("--m", c.m, "largest cube level")->check(CLI::Range(1, 5))->capture_default_str();
  find("poincare")->add_option("--trials", c.trials, "random functions per level")->capture_default_str();
  find("decouple")->add_option("--inner-samples", c.inner_samples, "zero-boundary ball samples")->capture_default_str();

  if (argc <= 1) {
    out.exit_code = 2;
    out.message = app.help();
    return out;
  }
  /// --config belongs to the top-level app; move it before the subcommand so
  /// it may appear anywhere on the command line.
  std::vector<std::string> args;
  std::vector<std::string> config_args;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) {
      config_args.push_back(a);
      config_args.push_back(argv[++i]);
    } else if (a.rfind("--config=", 0) == 0) {
      config_args.push_back(a);
    } else {
      args.push_back(a);
    }
  }
  args.insert(args.begin(), config_args.begin(), config_args.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    std::ostringstream os;
    const int code = app.exit(e, os, os);
    out.exit_code = code == 0 ? 0 : 2;
    out.message = os.str();
    return out;
  }
  for (auto& [sub, b] : subs) {
    if (!sub->parsed()) continue;
    c.subcommand = sub->get_name();
    const bool eps_given = b.eps->count() > 0;
    if (c.potential == "quadratic" && eps_given && c.eps != 0.0) {
      out.exit_code = 2;
      out.message = "conflicting potential options: --eps is only meaningful for cos_perturbed\n";
      return out;
    }
    if (c.potential == "cos_perturbed" && !eps_given) c.eps = 0.5;
    if (c.potential == "cos_perturbed" && !(c.eps > 0.0 && c.eps < 1.0)) {
      out.exit_code = 2;
      out.message = "--eps must lie in (0, 1)\n";
      return out;
    }
    if (c.exact && c.potential != "quadratic") {
      out.exit_code = 2;
      out.message = "conflicting potential options: --exact requires the quadratic potential\n";
      return out;
    }
    if (b.threads->count() == 0) c.threads = sampler::threads_from_env();
    if (c.threads == 0) c.threads = 1;
  }
  out.ok = true;
  return out;
}

int run(const ExperimentConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  RunContext ctx{config, log, fs::path(config.out), {}, {}, {}, {}};
  /// The output location is kept out of result files so reruns elsewhere
  /// stay byte-identical; the manifest records it.
  nlohmann::json prov_config = config.to_json();
  prov_config.erase("out");
  ctx.provenance = {{"version", kVersion}, {"config", prov_config}};
  ctx.stage("output directory", [&] {
    std::error_code ec;
    fs::create_directories(ctx.dir, ec);
    if (ec || !fs::is_directory(ctx.dir)) throw std::runtime_error("cannot create " + ctx.dir.string());
    return 0;
  });
  const std::string& s = config.subcommand;
  if (s == "sample") run_sample(ctx);
  else if (s == "clt") run_clt(ctx);
  else if (s == "charfn") run_charfn(ctx);
  else if (s == "homog") run_homog(ctx);
  else if (s == "mw") run_mw(ctx);
  else if (s == "poincare") run_poincare(ctx);
  else if (s == "decouple") run_decouple(ctx);
  else throw std::runtime_error("unknown subcommand '" + s + "'");

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& st : ctx.stages) stages.push_back({{"stage", st.name}, {"info", st.info}});
  const nlohmann::json manifest = {{"version", kVersion},     {"config", config.to_json()},
                                   {"wall_clock_seconds", wall}, {"stages", stages},
                                   {"warnings", ctx.warnings}, {"files", ctx.files}};
  io::write_atomic(ctx.dir / (s + "_manifest.json"), manifest.dump(2) + "\n");
  for (const auto& w : ctx.warnings) log << "warning: " << w << "\n";
  log << s << ": wrote " << ctx.files.size() << " files to " << ctx.dir.string() << "\n";
  return 0;
}

int main_entry(int argc, const char* const* argv) {
  const ParseOutcome p = parse_config(argc, argv);
  if (!p.ok) {
    (p.exit_code == 0 ? std::cout : std::cerr) << p.message;
    return p.exit_code;
  }
  try {
    return run(p.config, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "gradlab " << p.config.subcommand << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gradlab::cli
