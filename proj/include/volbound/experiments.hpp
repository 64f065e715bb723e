#pragma once

// Rho sweeps over one common-random-numbers batch, TSV output in the
// x / y1 / y2 / y3 plotting layout, and the inequality verification report.

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "volbound/asymptotics.hpp"
#include "volbound/errors.hpp"
#include "volbound/estimate.hpp"
#include "volbound/mc_engine.hpp"
#include "volbound/quadrature.hpp"
#include "volbound/sabr.hpp"
#include "volbound/smile.hpp"

namespace volbound {

struct SweepConfig {
  double sigma0 = 0.3;
  double alpha = 0.5;
  double T = 0.5;
  double rho_start = -1.0;
  double rho_end = 1.0;
  double rho_step = 0.1;
  std::size_t paths = 10'000'000;
  std::size_t steps = 512;
  std::uint64_t seed = 42;
  double x0 = 0.0;
  std::string out = "sweep.txt";

  void validate() const {
    if (!(sigma0 > 0.0)) throw InvalidConfig("sigma0 must be positive");
    if (!(alpha > 0.0)) throw InvalidConfig("alpha must be positive");
    if (!(T > 0.0)) throw InvalidConfig("T must be positive");
    if (!(rho_step > 0.0)) throw InvalidConfig("rho_step must be positive");
    if (!(rho_start >= -1.0 && rho_end <= 1.0 && rho_start <= rho_end)) {
      throw InvalidConfig("rho grid must satisfy -1 <= rho_start <= rho_end <= 1");
    }
    if (paths < 1) throw InvalidConfig("paths must be >= 1");
    if (steps < 1) throw InvalidConfig("steps must be >= 1");
    if (!std::isfinite(x0)) throw InvalidConfig("x0 must be finite");
  }

  SabrParams params(double rho = 0.0) const { return {sigma0, alpha, rho, x0}; }

  /// Inclusive grid rho_start, rho_start + rho_step, ..., rho_end, rounded to
  /// 1e-12 so that e.g. -1 + 3 * 0.1 is exactly -0.7.
  std::vector<double> rho_grid() const {
    const auto count = static_cast<std::size_t>(std::floor((rho_end - rho_start) / rho_step + 1e-9)) + 1;
    std::vector<double> grid;
    grid.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      double r = std::round((rho_start + static_cast<double>(i) * rho_step) * 1e12) / 1e12;
      r = std::clamp(r, -1.0, 1.0);
      if (r == 0.0) r = 0.0;  // no negative zero in the output
      grid.push_back(r);
    }
    return grid;
  }
};

/// Sets one SweepConfig field from its textual value. Keys are the field names.
inline void set_config_value(SweepConfig& cfg, const std::string& key, const std::string& value) {
  auto to_double = [&](const std::string& v) {
    std::size_t pos = 0;
    double d = 0.0;
    try {
      d = std::stod(v, &pos);
    } catch (const std::exception&) {
      throw InvalidConfig("config: '" + key + "' expects a number, got '" + v + "'");
    }
    if (pos != v.size()) throw InvalidConfig("config: '" + key + "' expects a number, got '" + v + "'");
    return d;
  };
  auto to_count = [&](const std::string& v) {
    const double d = to_double(v);
    if (d < 0.0 || d != std::floor(d)) throw InvalidConfig("config: '" + key + "' expects a count");
    return static_cast<std::uint64_t>(d);
  };
  if (key == "sigma0") cfg.sigma0 = to_double(value);
  else if (key == "alpha") cfg.alpha = to_double(value);
  else if (key == "T") cfg.T = to_double(value);
  else if (key == "rho_start") cfg.rho_start = to_double(value);
  else if (key == "rho_end") cfg.rho_end = to_double(value);
  else if (key == "rho_step") cfg.rho_step = to_double(value);
  else if (key == "paths") cfg.paths = to_count(value);
  else if (key == "steps") cfg.steps = to_count(value);
  else if (key == "seed") cfg.seed = to_count(value);
  else if (key == "x0") cfg.x0 = to_double(value);
  else if (key == "out") cfg.out = value;
  else throw InvalidConfig("config: unknown key '" + key + "'");
}

/// Parses flat "key = value" lines; '#' starts a comment.
inline void apply_config_text(SweepConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

inline void load_config_file(SweepConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

/// Presets for the four standard figures: sigma0 = 0.3,
/// (alpha, T) in {(0.5, 0.5), (0.5, 1), (1, 0.5), (1, 1)}, rho from -1 to 1 by 0.1.
inline SweepConfig figure_config(int id) {
  SweepConfig cfg;
  switch (id) {
    case 1: cfg.alpha = 0.5; cfg.T = 0.5; break;
    case 2: cfg.alpha = 0.5; cfg.T = 1.0; break;
    case 3: cfg.alpha = 1.0; cfg.T = 0.5; break;
    case 4: cfg.alpha = 1.0; cfg.T = 1.0; break;
    default: throw InvalidConfig("figure id must be 1..4");
  }
  cfg.out = "fig" + std::to_string(id) + ".txt";
  return cfg;
}

struct SweepRow {
  double rho = 0.0;
  double volswap = 0.0;
  double zviv = 0.0;
  double atmi = 0.0;
  double volswap_se = 0.0;
  double zviv_se = 0.0;
  double atmi_se = 0.0;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Simulates one batch for the configuration and solves ATMI and ZVIV at every
/// grid rho on it. The volatility swap strike is computed once.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg, const ProgressFn& progress = {}) {
  cfg.validate();
  const PathBatch batch = simulate_paths(cfg.params(), cfg.T, cfg.steps, cfg.paths, cfg.seed);
  const Estimate vs = volswap_strike(batch);
  std::vector<SweepRow> rows;
  for (const double rho : cfg.rho_grid()) {
    SmileSolution sol;
    try {
      sol = zero_vanna(batch, rho);
    } catch (const std::exception& e) {
      throw std::runtime_error("sweep failed at rho=" + std::to_string(rho) + ": " + e.what());
    }
    rows.push_back({rho, vs.value, sol.zviv.value, sol.atmi.value, vs.std_error, sol.zviv.std_error,
                    sol.atmi.std_error});
    if (progress) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "rho=%+.2f volswap=%.6f zviv=%.6f atmi=%.6f", rho, vs.value,
                    sol.zviv.value, sol.atmi.value);
      progress(buf);
    }
  }
  return rows;
}

inline std::filesystem::path se_path_for(const std::filesystem::path& path) {
  return path.parent_path() / (path.stem().string() + ".se.txt");
}

inline std::string format_g10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// Writes "x\ty1\ty2\ty3" (rho, volswap, zviv, atmi) and the standard errors to
/// the sibling file <stem>.se.txt, 10 significant digits.
inline void write_tsv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw InvalidConfig("write_tsv: no rows");
  auto write = [&](const std::filesystem::path& p, const char* header, auto&& cols) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + p.string() + " for writing");
    out << header << '\n';
    for (const auto& r : rows) {
      const std::array<double, 4> v = cols(r);
      out << format_g10(v[0]) << '\t' << format_g10(v[1]) << '\t' << format_g10(v[2]) << '\t'
          << format_g10(v[3]) << '\n';
    }
    if (!out) throw IoError("write failed for " + p.string());
  };
  write(path, "x\ty1\ty2\ty3",
        [](const SweepRow& r) { return std::array<double, 4>{r.rho, r.volswap, r.zviv, r.atmi}; });
  write(se_path_for(path), "x\ty1_se\ty2_se\ty3_se", [](const SweepRow& r) {
    return std::array<double, 4>{r.rho, r.volswap_se, r.zviv_se, r.atmi_se};
  });
}

// ---------------------------------------------------------------------------
// Verification report

struct ReportEntry {
  std::string check;
  std::string label;
  double value = 0.0;
  double bound = 0.0;
  double se = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::vector<ReportEntry> entries;

  bool all_pass() const {
    for (const auto& e : entries) {
      if (!e.pass) return false;
    }
    return true;
  }

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.pass ? 0 : 1;
    return n;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["status"] = all_pass() ? "PASS" : "FAIL";
    j["failures"] = failures();
    auto& arr = j["entries"] = nlohmann::json::array();
    for (const auto& e : entries) {
      arr.push_back({{"check", e.check},
                     {"label", e.label},
                     {"value", e.value},
                     {"bound", e.bound},
                     {"se", e.se},
                     {"result", e.pass ? "PASS" : "FAIL"}});
    }
    return j;
  }
};

/// value must not exceed bound by more than 3 standard errors.
inline ReportEntry upper_bound_entry(std::string check, std::string label, double value, double bound,
                                     double se) {
  return {std::move(check), std::move(label), value, bound, se, value <= bound + 3.0 * se};
}

/// PASS rules for one sweep: zviv - volswap <= 3 s.e. at every rho;
/// atmi - volswap <= 3 s.e. for rho <= 0.
inline std::vector<ReportEntry> sweep_entries(const std::string& tag, const std::vector<SweepRow>& rows) {
  std::vector<ReportEntry> out;
  for (const auto& r : rows) {
    const std::string label = tag + " rho=" + format_g10(r.rho);
    out.push_back(upper_bound_entry("zviv_lower_bound", label, r.zviv - r.volswap, 0.0,
                                    r.zviv_se + r.volswap_se));
    if (r.rho <= 0.0) {
      out.push_back(upper_bound_entry("atmi_lower_bound", label, r.atmi - r.volswap, 0.0,
                                      r.atmi_se + r.volswap_se));
    }
  }
  return out;
}

/// |zviv - volswap| < |atmi - volswap| at the given rho values (present rows only).
inline std::vector<ReportEntry> ordering_entries(const std::string& tag, const std::vector<SweepRow>& rows,
                                                 const std::vector<double>& rhos) {
  std::vector<ReportEntry> out;
  for (const auto& r : rows) {
    for (const double target : rhos) {
      if (std::abs(r.rho - target) > 1e-9) continue;
      const double zgap = std::abs(r.zviv - r.volswap);
      const double agap = std::abs(r.atmi - r.volswap);
      out.push_back({"zviv_closer_than_atmi", tag + " rho=" + format_g10(r.rho), zgap, agap, 0.0, zgap < agap});
    }
  }
  return out;
}

/// (ATMI - volswap) and (ZVIV - volswap) at one maturity, from one batch.
struct GapAtMaturity {
  double T;
  Estimate atmi_gap;  // value = difference, std_error = combined
  Estimate zviv_gap;
};

inline GapAtMaturity measure_gaps(const SabrParams& p, double T, std::size_t steps, std::size_t paths,
                                  std::uint64_t seed, bool with_zviv = true) {
  const PathBatch batch = simulate_paths(p, T, steps, paths, seed);
  const Estimate vs = volswap_strike(batch);
  const Estimate at = atmi(batch, p.rho);
  GapAtMaturity g{T, {at.value - vs.value, combined_se(at, vs), paths}, {}};
  if (with_zviv) {
    const SmileSolution sol = zero_vanna(batch, p.rho);
    g.zviv_gap = {sol.zviv.value - vs.value, combined_se(sol.zviv, vs), paths};
  }
  return g;
}

/// Richardson extrapolation of gap/T to T -> 0 from maturities T and T/2:
/// 2 s(T/2) - s(T), with the conservative error 2 se(T/2) + se(T).
inline Estimate richardson_slope(const Estimate& gap_T, double T, const Estimate& gap_half, double T_half) {
  const double s_full = gap_T.value / T;
  const double s_half = gap_half.value / T_half;
  return {2.0 * s_half - s_full, 2.0 * gap_half.std_error / T_half + gap_T.std_error / T,
          std::min(gap_T.n, gap_half.n)};
}

struct VerifyConfig {
  std::size_t paths = 1'000'000;
  std::size_t steps = 512;
  std::uint64_t seed = 42;
  std::vector<int> figures = {1, 2, 3, 4};
  // Short-maturity slope.
  double slope_sigma0 = 0.3;
  double slope_alpha = 0.5;
  double slope_rho = -0.5;
  double slope_T = 0.05;
  // Zero-correlation curvature.
  double curv_sigma0 = 0.3;
  double curv_alpha = 1.0;
  double curv_T = 0.5;
  // Pathwise Malliavin functionals.
  std::size_t malliavin_paths = 10'000;
};

/// Runs every check and returns one entry per grid point or comparison.
inline VerifyReport verify_report(const VerifyConfig& vc, const ProgressFn& progress = {}) {
  VerifyReport rep;
  auto note = [&](const std::string& s) {
    if (progress) progress(s);
  };
  auto add = [&](std::vector<ReportEntry> es) {
    for (auto& e : es) rep.entries.push_back(std::move(e));
  };

  // Closed forms against nested quadrature, and Taylor ratios.
  note("closed forms vs quadrature");
  for (const double a : {0.25, 0.5, 1.0}) {
    for (const double s0 : {0.1, 0.3}) {
      for (const double T : {0.1, 0.5, 1.0}) {
        const std::string label =
            "alpha=" + format_g10(a) + " sigma0=" + format_g10(s0) + " T=" + format_g10(T);
        const std::array<std::pair<double, double>, 4> pairs = {
            std::pair{t1_bound(a, s0, T), quadrature::t1_bound_integral(a, s0, T)},
            std::pair{t2_exact(a, s0, T), quadrature::t2_integral(a, s0, T)},
            std::pair{t3_exact(a, s0, T), quadrature::t3_integral(a, s0, T)},
            std::pair{t4_exact(a, s0, T), quadrature::t4_integral(a, s0, T)}};
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          const double rel = std::abs(pairs[i].first / pairs[i].second - 1.0);
          rep.entries.push_back({"closed_form_vs_quadrature", "t" + std::to_string(i + 1) + " " + label, rel,
                                 1e-10, 0.0, rel <= 1e-10});
        }
      }
    }
  }
  for (const double a : {0.5, 1.0}) {
    const double s0 = 0.3;
    const double T = 1e-3;
    const std::array<double, 4> ratios = {t1_bound(a, s0, T) / t1_leading(a, s0, T),
                                          t2_exact(a, s0, T) / t2_leading(a, s0, T),
                                          t3_exact(a, s0, T) / t3_leading(a, s0, T),
                                          t4_exact(a, s0, T) / t4_leading(a, s0, T)};
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      const double dev = std::abs(ratios[i] - 1.0);
      rep.entries.push_back({"taylor_ratio", "t" + std::to_string(i + 1) + " alpha=" + format_g10(a) + " T=1e-3",
                             ratios[i], 0.01, 0.0, dev <= 0.01});
    }
  }

  // Pathwise Malliavin functionals against the closed forms.
  for (const double a : {0.5, 1.0}) {
    for (const double T : {0.5, 1.0}) {
      note("malliavin functionals alpha=" + format_g10(a) + " T=" + format_g10(T));
      const SabrParams p{0.3, a, 0.0, 0.0};
      const PathBatch b = simulate_paths(p, T, vc.steps, vc.malliavin_paths, vc.seed, PathStorage::full);
      const MalliavinEstimates m = malliavin_functionals(b);
      const std::string label = "alpha=" + format_g10(a) + " T=" + format_g10(T);
      rep.entries.push_back(upper_bound_entry("malliavin_t1_bound", label, m.t1.value, t1_bound(a, 0.3, T),
                                              m.t1.std_error));
      const std::array<std::pair<Estimate, double>, 3> two_sided = {
          std::pair{m.t2, t2_exact(a, 0.3, T)}, std::pair{m.t3, t3_exact(a, 0.3, T)},
          std::pair{m.t4, t4_exact(a, 0.3, T)}};
      for (std::size_t i = 0; i < two_sided.size(); ++i) {
        const auto& [est, exact] = two_sided[i];
        rep.entries.push_back({"malliavin_t" + std::to_string(i + 2), label, est.value, exact, est.std_error,
                               std::abs(est.value - exact) <= 3.0 * est.std_error});
      }
    }
  }

  // Figure sweeps.
  for (const int id : vc.figures) {
    SweepConfig cfg = figure_config(id);
    cfg.paths = vc.paths;
    cfg.steps = vc.steps;
    cfg.seed = vc.seed;
    note("figure " + std::to_string(id) + " sweep");
    const auto rows = run_sweep(cfg);
    const std::string tag = "fig" + std::to_string(id);
    add(sweep_entries(tag, rows));
    if (id == 4) add(ordering_entries(tag, rows, {-0.9, -0.8, -0.7, -0.6, -0.5, -0.4, -0.3, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}));
  }

  // Short-maturity slopes by Richardson extrapolation.
  {
    note("short-maturity slopes");
    const SabrParams p{vc.slope_sigma0, vc.slope_alpha, vc.slope_rho, 0.0};
    const auto full = measure_gaps(p, vc.slope_T, vc.steps, vc.paths, vc.seed);
    const auto half = measure_gaps(p, 0.5 * vc.slope_T, vc.steps, vc.paths, vc.seed);
    const Estimate atmi_slope = richardson_slope(full.atmi_gap, full.T, half.atmi_gap, half.T);
    const Estimate zviv_slope = richardson_slope(full.zviv_gap, full.T, half.zviv_gap, half.T);
    const std::string label = "sigma0=" + format_g10(p.sigma0) + " alpha=" + format_g10(p.alpha) +
                              " rho=" + format_g10(p.rho);
    rep.entries.push_back(upper_bound_entry("atmi_slope", label, atmi_slope.value,
                                            atmi_slope_bound(p.rho, p.alpha, p.sigma0), atmi_slope.std_error));
    rep.entries.push_back(
        upper_bound_entry("zviv_slope", label, zviv_slope.value, zviv_slope_limit(), zviv_slope.std_error));
  }

  // Zero-correlation curvature: measured (ATMI - volswap)/T^2 must be
  // compatible, at 3 s.e., with a ratio in [0.5, 2] to the limit constant.
  {
    note("zero-correlation curvature");
    const SabrParams p{vc.curv_sigma0, vc.curv_alpha, 0.0, 0.0};
    const auto g = measure_gaps(p, vc.curv_T, vc.steps, vc.paths, vc.seed, false);
    const double T2 = vc.curv_T * vc.curv_T;
    const double value = g.atmi_gap.value / T2;
    const double se = g.atmi_gap.std_error / T2;
    const double limit = atmi_curvature_rho0(p.alpha, p.sigma0);
    const bool pass = value <= 0.5 * limit + 3.0 * se && value >= 2.0 * limit - 3.0 * se;
    rep.entries.push_back({"atmi_curvature_rho0",
                           "sigma0=" + format_g10(p.sigma0) + " alpha=" + format_g10(p.alpha) +
                               " T=" + format_g10(vc.curv_T),
                           value, limit, se, pass});
  }
  return rep;
}

}  // namespace volbound
