#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "gradlab/cli.hpp"
#include "gradlab/io.hpp"

using namespace gradlab;
namespace fs = std::filesystem;

namespace {

cli::ParseOutcome parse(std::vector<std::string> args) {
  args.insert(args.begin(), "gradlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::parse_config(int(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gradlab_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + GRADLAB_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("argument parsing") {
  const auto empty = parse({});
  CHECK_FALSE(empty.ok);
  CHECK(empty.exit_code == 2);

  const auto help = parse({"--help"});
  CHECK_FALSE(help.ok);
  CHECK(help.exit_code == 0);

  const auto ok = parse({"sample", "--n", "8", "--samples", "20", "--seed", "4", "--sweep", "heat_bath"});
  REQUIRE(ok.ok);
  CHECK(ok.config.subcommand == "sample");
  CHECK(ok.config.n == 8);
  CHECK(ok.config.samples == 20);
  CHECK(ok.config.seed == 4);
  CHECK(ok.config.sweep == "heat_bath");

  const auto cos = parse({"clt", "--potential", "cos_perturbed"});
  REQUIRE(cos.ok);
  CHECK(cos.config.eps == 0.5);

  CHECK(parse({"sample", "--potential", "quadratic", "--eps", "0.3"}).exit_code == 2);
  CHECK(parse({"sample", "--potential", "cos_perturbed", "--eps", "1.2"}).exit_code == 2);
  CHECK(parse({"sample", "--potential", "cos_perturbed", "--eps", "0"}).exit_code == 2);
  CHECK(parse({"sample", "--potential", "cos_perturbed", "--exact"}).exit_code == 2);
  CHECK(parse({"sample", "--bogus"}).exit_code == 2);
  CHECK(parse({"nosuch"}).exit_code == 2);
}

TEST_CASE("config file with flag override") {
  const auto dir = scratch("config");
  const auto file = dir / "run.ini";
  std::ofstream(file) << "[sample]\nn = 6\nsamples = 30\nseed = 9\n";
  const auto p = parse({"sample", "--config", file.string(), "--seed", "11"});
  REQUIRE(p.ok);
  CHECK(p.config.n == 6);
  CHECK(p.config.samples == 30);
  CHECK(p.config.seed == 11);

  std::ofstream(dir / "bad.ini") << "[sample]\nnot_a_key = 1\n";
  CHECK(parse({"sample", "--config", (dir / "bad.ini").string()}).exit_code == 2);
}

TEST_CASE("csv and atomic writes") {
  CHECK(io::format_double(0.1) == "0.1");
  const auto text = io::csv_text({{"seed", 1}}, {"a", "b"}, {{1.0, 2.5}});
  CHECK(text == "# {\"seed\":1}\na,b\n1,2.5\n");
  const auto dir = scratch("atomic");
  std::ofstream(dir / "file") << "x";
  /// A path below a regular file cannot be created, even by root.
  CHECK_THROWS_AS(io::write_atomic(dir / "file" / "x.txt", "x"), std::runtime_error);
  io::write_atomic(dir / "ok.txt", "abc");
  CHECK(slurp(dir / "ok.txt") == "abc");
  CHECK_FALSE(fs::exists(dir / "ok.txt.tmp"));
}

TEST_CASE("snapshot round trip") {
  auto d = std::make_shared<const lattice::Domain>(lattice::build_square(3));
  std::vector<lattice::FieldConfig> fs_;
  for (int c = 0; c < 2; ++c) {
    lattice::FieldConfig f{d, std::vector<double>(d->box_size(), 0.0)};
    for (std::size_t i : d->interior()) f.values[i] = 0.25 * double(i) - c;
    fs_.push_back(f);
  }
  const auto dir = scratch("snap");
  io::write_snapshot(dir / "s.grdf", fs_);
  const auto s = io::read_snapshot(dir / "s.grdf");
  CHECK(s.N == 3);
  REQUIRE(s.fields.size() == 2);
  CHECK(s.fields[0] == fs_[0].values);
  CHECK(s.fields[1] == fs_[1].values);
  std::ofstream(dir / "junk.grdf") << "nope";
  CHECK_THROWS(io::read_snapshot(dir / "junk.grdf"));
}

TEST_CASE("subcommands run and exit codes") {
  const auto dir = scratch("runs");
  CHECK(run_cli("") == 2);
  CHECK(run_cli("sample --n 6 --samples 10 --out " + (dir / "s").string()) == 0);
  CHECK(fs::exists(dir / "s" / "sample.grdf"));
  CHECK(fs::exists(dir / "s" / "sample_summary.json"));
  CHECK(fs::exists(dir / "s" / "sample_manifest.json"));
  CHECK(run_cli("mw --quadrature 10 --out " + (dir / "m").string()) == 0);
  CHECK(fs::exists(dir / "m" / "mw.csv"));
  CHECK(run_cli("poincare --m 1 --trials 6 --out " + (dir / "p").string()) == 0);
  CHECK(fs::exists(dir / "p" / "poincare.csv"));
  std::ofstream(dir / "file") << "x";
  CHECK(run_cli("sample --n 4 --samples 2 --out " + (dir / "file" / "x").string()) == 1);
  CHECK(run_cli("sample --potential quadratic --eps 0.2") == 2);
}

TEST_CASE("fixed seed gives byte-identical results") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const std::string args = "clt --potential cos_perturbed --n 6 --samples 200 --seed 3 --bootstrap 20 --t-points 9";
  REQUIRE(run_cli(args + " --out " + a.string()) == 0);
  REQUIRE(run_cli(args + " --out " + b.string()) == 0);
  int compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const auto name = e.path().filename().string();
    if (name.find("manifest") != std::string::npos) continue;
    CHECK(slurp(e.path()) == slurp(b / name));
    ++compared;
  }
  CHECK(compared >= 3);
}
