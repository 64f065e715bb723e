// volbound command line: rho sweeps, figure presets, one-shot estimators and
// the verification report.
//
// Exit codes: 0 success / all checks pass, 1 verification failure,
// 2 configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "volbound/volbound.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;

struct ConfigFlags {
  std::string config_file;
  std::optional<double> sigma0, alpha, T, rho_start, rho_end, rho_step, x0;
  std::optional<std::uint64_t> paths, steps, seed;
  std::optional<std::string> out;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "Flat 'key = value' config file")->check(CLI::ExistingFile);
    app->add_option("--sigma0", sigma0, "Initial volatility");
    app->add_option("--alpha", alpha, "Volatility of volatility");
    app->add_option("--T", T, "Maturity in years");
    app->add_option("--rho_start,--rho-start", rho_start, "First correlation of the grid");
    app->add_option("--rho_end,--rho-end", rho_end, "Last correlation of the grid");
    app->add_option("--rho_step,--rho-step", rho_step, "Correlation increment");
    app->add_option("--paths", paths, "Monte Carlo paths");
    app->add_option("--steps", steps, "Time steps per path");
    app->add_option("--seed", seed, "Master seed");
    app->add_option("--x0", x0, "Initial log price");
    app->add_option("--out", out, "Output TSV path");
  }

  // Defaults < config file < flags.
  volbound::SweepConfig resolve(volbound::SweepConfig cfg) const {
    if (!config_file.empty()) volbound::load_config_file(cfg, config_file);
    if (sigma0) cfg.sigma0 = *sigma0;
    if (alpha) cfg.alpha = *alpha;
    if (T) cfg.T = *T;
    if (rho_start) cfg.rho_start = *rho_start;
    if (rho_end) cfg.rho_end = *rho_end;
    if (rho_step) cfg.rho_step = *rho_step;
    if (x0) cfg.x0 = *x0;
    if (paths) cfg.paths = *paths;
    if (steps) cfg.steps = *steps;
    if (seed) cfg.seed = *seed;
    if (out) cfg.out = *out;
    cfg.validate();
    return cfg;
  }
};

void print_estimate(const char* name, const volbound::Estimate& e) {
  std::printf("%s\t%.10g\t%.10g\t%zu\n", name, e.value, e.std_error, e.n);
}

int run_sweep_to_file(const volbound::SweepConfig& cfg) {
  std::fprintf(stderr, "sweep sigma0=%g alpha=%g T=%g paths=%zu steps=%zu seed=%llu -> %s\n", cfg.sigma0,
               cfg.alpha, cfg.T, cfg.paths, cfg.steps, static_cast<unsigned long long>(cfg.seed),
               cfg.out.c_str());
  const auto rows = volbound::run_sweep(cfg, [](const std::string& s) { std::fprintf(stderr, "  %s\n", s.c_str()); });
  volbound::write_tsv(rows, cfg.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-vanna implied volatility vs volatility swap strike under lognormal SABR"};
  app.require_subcommand(1);

  ConfigFlags sweep_flags, figure_flags, price_flags, volswap_flags, zviv_flags;

  auto* sweep = app.add_subcommand("sweep", "Volswap, ZVIV and ATMI over a rho grid, written as TSV");
  sweep_flags.attach(sweep);

  int figure_id = 1;
  auto* figure = app.add_subcommand("figure", "Preset sweep for one of the four standard figures");
  figure->add_option("--id", figure_id, "Figure 1..4")->required()->check(CLI::Range(1, 4));
  figure_flags.attach(figure);

  double price_rho = 0.0;
  double price_k = 0.0;
  bool price_euler = false;
  auto* price = app.add_subcommand("price", "Call price by the mixing estimator");
  price_flags.attach(price);
  price->add_option("--rho", price_rho, "Spot-vol correlation")->check(CLI::Range(-1.0, 1.0));
  price->add_option("--k", price_k, "Log strike");
  price->add_flag("--euler", price_euler, "Also run the log-Euler oracle");

  auto* volswap = app.add_subcommand("volswap", "Volatility swap strike");
  volswap_flags.attach(volswap);

  double zviv_rho = 0.0;
  auto* zviv = app.add_subcommand("zviv", "Zero-vanna strike, ZVIV and ATMI at one correlation");
  zviv_flags.attach(zviv);
  zviv->add_option("--rho", zviv_rho, "Spot-vol correlation")->check(CLI::Range(-1.0, 1.0));

  volbound::VerifyConfig vc;
  std::string report_out;
  auto* verify = app.add_subcommand("verify", "Inequality and asymptotics report (JSON)");
  verify->add_option("--paths", vc.paths, "Paths per Monte Carlo batch")->capture_default_str();
  verify->add_option("--steps", vc.steps, "Time steps per path")->capture_default_str();
  verify->add_option("--seed", vc.seed, "Master seed")->capture_default_str();
  verify->add_option("--malliavin-paths", vc.malliavin_paths, "Full paths for the Malliavin checks")
      ->capture_default_str();
  verify->add_option("--figures", vc.figures, "Figure sweeps to include")->check(CLI::Range(1, 4));
  verify->add_option("--out", report_out, "Write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sweep) {
      volbound::SweepConfig defaults;
      defaults.out = "sweep.txt";
      return run_sweep_to_file(sweep_flags.resolve(defaults));
    }
    if (*figure) {
      return run_sweep_to_file(figure_flags.resolve(volbound::figure_config(figure_id)));
    }
    if (*price) {
      const auto cfg = price_flags.resolve({});
      auto p = cfg.params(price_rho);
      const auto batch = volbound::simulate_paths(p, cfg.T, cfg.steps, cfg.paths, cfg.seed);
      print_estimate("mixing_price", volbound::mixing_call_price(batch, price_rho, price_k));
      if (price_euler) {
        print_estimate("euler_price",
                       volbound::euler_oracle_price(p, cfg.T, price_k, cfg.steps, cfg.paths, cfg.seed));
      }
      return kExitOk;
    }
    if (*volswap) {
      const auto cfg = volswap_flags.resolve({});
      const auto batch = volbound::simulate_paths(cfg.params(), cfg.T, cfg.steps, cfg.paths, cfg.seed);
      print_estimate("volswap", volbound::volswap_strike(batch));
      return kExitOk;
    }
    if (*zviv) {
      const auto cfg = zviv_flags.resolve({});
      const auto batch = volbound::simulate_paths(cfg.params(zviv_rho), cfg.T, cfg.steps, cfg.paths, cfg.seed);
      const auto vs = volbound::volswap_strike(batch);
      const auto sol = volbound::zero_vanna(batch, zviv_rho);
      print_estimate("volswap", vs);
      print_estimate("zviv", sol.zviv);
      print_estimate("atmi", sol.atmi);
      std::printf("k_hat\t%.10g\nk_star\t%.10g\niterations\t%d\nresidual\t%.3g\n", sol.k_hat, sol.k_star,
                  sol.iterations, sol.residual);
      return kExitOk;
    }
    if (*verify) {
      if (vc.paths < 1 || vc.steps < 1 || vc.malliavin_paths < 1) {
        throw volbound::InvalidConfig("verify: paths, steps and malliavin-paths must be >= 1");
      }
      const auto rep = volbound::verify_report(vc, [](const std::string& s) { std::fprintf(stderr, "%s\n", s.c_str()); });
      const std::string text = rep.to_json().dump(2) + "\n";
      if (report_out.empty()) {
        std::fputs(text.c_str(), stdout);
      } else {
        std::ofstream f(report_out, std::ios::binary | std::ios::trunc);
        if (!f) throw volbound::IoError("cannot open " + report_out);
        f << text;
      }
      std::fprintf(stderr, "%s: %zu checks, %zu failures\n", rep.all_pass() ? "PASS" : "FAIL",
                   rep.entries.size(), rep.failures());
      return rep.all_pass() ? kExitOk : kExitVerifyFailed;
    }
  } catch (const volbound::InvalidConfig& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitVerifyFailed;
  }
  return kExitOk;
}
