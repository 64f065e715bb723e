#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "volbound/experiments.hpp"

using namespace volbound;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir() {
  auto d = fs::temp_directory_path() / "volbound_tests";
  fs::create_directories(d);
  return d;
}

SweepConfig small_config() {
  SweepConfig cfg = figure_config(1);
  cfg.paths = 20000;
  cfg.steps = 32;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("rho grid", "[experiments]") {
  SweepConfig cfg;
  const auto grid = cfg.rho_grid();
  REQUIRE(grid.size() == 21);
  CHECK(grid.front() == -1.0);
  CHECK(grid.back() == 1.0);
  CHECK(grid[3] == -0.7);
  CHECK(grid[10] == 0.0);
  CHECK_FALSE(std::signbit(grid[10]));

  cfg.rho_start = -0.5;
  cfg.rho_end = 0.5;
  cfg.rho_step = 0.25;
  CHECK(cfg.rho_grid() == std::vector<double>{-0.5, -0.25, 0.0, 0.25, 0.5});
}

TEST_CASE("figure presets", "[experiments]") {
  const auto f1 = figure_config(1);
  CHECK(f1.sigma0 == 0.3);
  CHECK(f1.alpha == 0.5);
  CHECK(f1.T == 0.5);
  CHECK(f1.paths == 10'000'000);
  CHECK(figure_config(4).alpha == 1.0);
  CHECK(figure_config(4).T == 1.0);
  CHECK_THROWS_AS(figure_config(5), InvalidConfig);
}

TEST_CASE("config text parsing", "[experiments]") {
  SweepConfig cfg;
  apply_config_text(cfg, "# figure 2\nsigma0 = 0.25\nalpha=1\n T = 0.75 # years\npaths = 1000\nout = a b.txt\n");
  CHECK(cfg.sigma0 == 0.25);
  CHECK(cfg.alpha == 1.0);
  CHECK(cfg.T == 0.75);
  CHECK(cfg.paths == 1000);
  CHECK(cfg.out == "a b.txt");
  CHECK_THROWS_AS(apply_config_text(cfg, "bogus = 1\n"), InvalidConfig);
  CHECK_THROWS_AS(apply_config_text(cfg, "paths = 1.5\n"), InvalidConfig);
  CHECK_THROWS_AS(apply_config_text(cfg, "alpha 1\n"), InvalidConfig);

  SweepConfig bad;
  bad.rho_step = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidConfig);
  bad = SweepConfig{};
  bad.rho_end = 1.5;
  CHECK_THROWS_AS(bad.validate(), InvalidConfig);
  bad = SweepConfig{};
  bad.paths = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidConfig);
}

TEST_CASE("sweep rows and TSV layout", "[experiments]") {
  const auto cfg = small_config();
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 21);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].volswap == rows[0].volswap);
    CHECK(rows[i].zviv > 0.0);
    CHECK(rows[i].atmi > 0.0);
    CHECK(rows[i].zviv_se >= 0.0);
    if (i > 0) CHECK(rows[i].rho > rows[i - 1].rho);
  }

  const auto out = temp_dir() / "sweep_layout.txt";
  write_tsv(rows, out);
  const std::string text = slurp(out);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x\ty1\ty2\ty3");
  std::size_t count = 1;
  while (std::getline(in, line)) ++count;
  CHECK(count == 22);
  CHECK(text.find("\n-0.7\t") != std::string::npos);

  const auto se = temp_dir() / "sweep_layout.se.txt";
  REQUIRE(fs::exists(se));
  CHECK(slurp(se).rfind("x\ty1_se\ty2_se\ty3_se\n", 0) == 0);

  // Same configuration, same bytes.
  const auto again = temp_dir() / "sweep_layout_again.txt";
  write_tsv(run_sweep(cfg), again);
  CHECK(slurp(again) == text);

  CHECK_THROWS_AS(write_tsv({}, out), InvalidConfig);
  CHECK_THROWS_AS(write_tsv(rows, temp_dir() / "missing_dir" / "x.txt"), IoError);
}

TEST_CASE("report PASS rules on doctored rows", "[experiments]") {
  std::vector<SweepRow> rows = {
      {-0.5, 0.300, 0.2990, 0.2950, 1e-4, 1e-4, 1e-4},  // both below: PASS
      {0.0, 0.300, 0.3005, 0.2990, 1e-4, 1e-4, 1e-4},   // zviv 2.5 se above: PASS
      {0.5, 0.300, 0.3007, 0.3100, 1e-4, 1e-4, 1e-4},   // zviv 3.5 se above: FAIL; atmi unchecked
      {-0.3, 0.300, 0.2990, 0.3007, 1e-4, 1e-4, 1e-4},  // atmi 3.5 se above at rho <= 0: FAIL
  };
  const auto entries = sweep_entries("doctored", rows);
  REQUIRE(entries.size() == 7);
  VerifyReport rep{entries};
  CHECK(rep.failures() == 2);
  CHECK_FALSE(rep.all_pass());
  CHECK(entries[0].pass);
  CHECK(entries[1].pass);
  CHECK(entries[2].pass);
  CHECK(entries[3].pass);
  CHECK_FALSE(entries[4].pass);
  CHECK(entries[4].check == "zviv_lower_bound");
  CHECK_FALSE(entries[6].pass);
  CHECK(entries[6].check == "atmi_lower_bound");

  const auto order = ordering_entries("doctored", rows, {0.5, -0.5});
  REQUIRE(order.size() == 2);
  CHECK(order[0].pass);  // rho=-0.5: |zviv gap| 0.001 < |atmi gap| 0.005
  CHECK(order[1].pass);

  const auto j = rep.to_json();
  CHECK(j["status"] == "FAIL");
  CHECK(j["entries"].size() == 7);
}

TEST_CASE("Richardson slope", "[experiments]") {
  // gap(T) = s T + c T^2 exactly: extrapolation recovers s.
  const double s = -0.004, c = 0.02;
  auto gap = [&](double T) { return Estimate{s * T + c * T * T, 1e-6, 100}; };
  const auto e = richardson_slope(gap(0.05), 0.05, gap(0.025), 0.025);
  CHECK(e.value == Catch::Approx(s).margin(1e-14));
  CHECK(e.std_error == Catch::Approx(2e-6 / 0.025 + 1e-6 / 0.05));
}

TEST_CASE("CLI exit codes and determinism", "[experiments][cli]") {
  const char* cli = std::getenv("VOLBOUND_CLI");
  if (cli == nullptr) SKIP("VOLBOUND_CLI not set");
  const auto dir = temp_dir();
  auto run = [&](const std::string& args) {
    const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };
  const auto a = dir / "cli_a.txt";
  const auto b = dir / "cli_b.txt";
  CHECK(run("figure --id 2 --paths 5000 --steps 16 --seed 3 --out " + a.string()) == 0);
  CHECK(run("figure --id 2 --paths 5000 --steps 16 --seed 3 --out " + b.string()) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(dir / "cli_a.se.txt") == slurp(dir / "cli_b.se.txt"));

  const auto cfg = dir / "cfg.txt";
  std::ofstream(cfg) << "sigma0 = 0.3\nalpha = 0.5\nT = 0.5\nrho_start = -0.2\nrho_end = 0.2\npaths = 3000\nsteps = 8\n";
  const auto c = dir / "cli_c.txt";
  CHECK(run("sweep --config " + cfg.string() + " --rho_step 0.2 --out " + c.string()) == 0);
  const std::string swept = slurp(c);
  CHECK(std::count(swept.begin(), swept.end(), '\n') == 4);

  CHECK(run("figure --id 9") == 2);
  CHECK(run("sweep --paths 0") == 2);
  CHECK(run("sweep --rho_step -1") == 2);
  CHECK(run("volswap --paths 2000 --steps 8") == 0);
  CHECK(run("zviv --paths 2000 --steps 8 --rho -0.3") == 0);
  CHECK(run("price --paths 2000 --steps 8 --rho 0.2 --k 0.1 --euler") == 0);
}
