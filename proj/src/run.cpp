#include "ceasefire/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ceasefire/four_mode.hpp"
#include "ceasefire/parallel.hpp"
#include "ceasefire/scan_rate.hpp"

namespace ceasefire {

namespace fs = std::filesystem;

std::string format_float(double v) {
  char buf[40];
  if (std::isnan(v)) return "nan";
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

CsvWriter::CsvWriter(std::string path, std::vector<std::string> columns)
    : path_(std::move(path)), cols_(columns.size()) {
  buf_ = "# ";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) buf_ += ",";
    buf_ += columns[i];
  }
  buf_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != cols_) {
    throw Error(ErrorKind::io, "csv row width mismatch for " + path_);
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buf_ += ",";
    buf_ += format_float(values[i]);
  }
  buf_ += "\n";
  ++rows_;
}

RunManifest::Output CsvWriter::close() {
  std::ofstream out(path_, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::io, "cannot write output file: " + path_);
  }
  out << buf_;
  if (!out) {
    throw Error(ErrorKind::io, "write failed: " + path_);
  }
  return {path_, rows_, cols_};
}

json RunManifest::to_json() const {
  json j;
  j["command"] = command;
  j["config_digest"] = config_digest;
  j["parameters"] = parameters;
  j["outputs"] = json::array();
  for (const auto& o : outputs) {
    j["outputs"].push_back({{"path", o.path}, {"rows", o.rows}, {"cols", o.cols}});
  }
  j["wall_time"] = wall_time;
  j["version"] = version;
  return j;
}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  }
  return v;
}

std::string out_path(const RunOptions& opts, const std::string& name) {
  return (fs::path(opts.out_dir) / name).string();
}

void cmd_two_mode(const Config& cfg, const RunOptions& opts, RunManifest& man) {
  const TwoModeParams p = two_mode_from_config(cfg);
  const json& grid = cfg.section("grid");
  const double lo = require_number(grid, "grid", "omega_min");
  const double hi = require_number(grid, "grid", "omega_max");
  const int pts = static_cast<int>(require_number(grid, "grid", "points"));
  if (!(hi > lo) || pts < 2) {
    throw Error(ErrorKind::config, "grid: omega_max must exceed omega_min, points >= 2");
  }
  const double tol = number_or(cfg.section("quadrature"), "tol", 1e-9);

  const std::vector<double> omegas = linspace(lo, hi, pts);
  const VisibilityCurve cf = visibility(omegas, p, VisibilityMode::ceasefire());
  const VisibilityCurve s1 =
      visibility(omegas, p, VisibilityMode::standard(p.kappa_l));
  const VisibilityCurve s2 =
      visibility(omegas, p, VisibilityMode::standard(2.0 * p.kappa_l));

  CsvWriter w(out_path(opts, "two_mode_visibility.csv"),
              {"omega:kappa_l", "alpha_cf:dimensionless",
               "alpha_std_critical:dimensionless", "alpha_std_overcoupled:dimensionless"});
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    w.row({omegas[i], cf.alphas[i], s1.alphas[i], s2.alphas[i]});
  }
  man.outputs.push_back(w.close());

  const EnhancementResult e = enhancement(p, tol);
  CsvWriter we(out_path(opts, "two_mode_enhancement.csv"),
               {"enhancement:dimensionless", "integral_cf:kappa_l",
                "integral_std:kappa_l", "window:kappa_l", "est_rel_error:dimensionless"});
  we.row({e.value, e.integral_cf, e.integral_std, e.integration_window, e.est_rel_error});
  man.outputs.push_back(we.close());
}

void cmd_scan_map(const Config& cfg, const RunOptions& opts, RunManifest& man) {
  const json& sm = cfg.section("scan_map");
  const auto g_grid = linspace(require_number(sm, "scan_map", "g_min"),
                               require_number(sm, "scan_map", "g_max"),
                               static_cast<int>(require_number(sm, "scan_map", "g_points")));
  const auto ratios = linspace(require_number(sm, "scan_map", "ratio_min"),
                               require_number(sm, "scan_map", "ratio_max"),
                               static_cast<int>(require_number(sm, "scan_map", "ratio_points")));
  const double tol = number_or(cfg.section("quadrature"), "tol", 1e-9);
  const EnhancementMap m = enhancement_map(g_grid, ratios, 1.0, tol, opts.threads);

  CsvWriter w(out_path(opts, "scan_map.csv"),
              {"g:kappa_l", "kappa_m_ratio:dimensionless", "enhancement:dimensionless",
               "oscillating:flag"});
  for (std::size_t gi = 0; gi < m.g_values.size(); ++gi) {
    for (std::size_t ri = 0; ri < m.ratio_values.size(); ++ri) {
      w.row({m.g_values[gi], m.ratio_values[ri], m.cell(gi, ri),
             static_cast<double>(m.oscillating[gi * m.ratio_values.size() + ri])});
    }
  }
  man.outputs.push_back(w.close());

  CsvWriter wr(out_path(opts, "scan_map_ridge.csv"),
               {"g:kappa_l", "kappa_m_opt_ratio:dimensionless", "enhancement:dimensionless"});
  for (std::size_t gi = 0; gi < m.g_values.size(); ++gi) {
    wr.row({m.g_values[gi], m.ridge_ratio[gi], m.ridge_e[gi]});
  }
  man.outputs.push_back(wr.close());
}

void cmd_mismatch(const Config& cfg, const RunOptions& opts, RunManifest& man) {
  const json& ms = cfg.section("mismatch");
  const TwoModeParams base(1.0, require_number(ms, "mismatch", "kappa_m"), 0.0, 0.0);

  const int n = static_cast<int>(require_number(ms, "mismatch", "grid_points"));
  const auto scg = linspace(0.0, require_number(ms, "mismatch", "sqrt_cg_max"), n);
  const auto sch = linspace(0.0, require_number(ms, "mismatch", "sqrt_ch_max"), n);
  CsvWriter w(out_path(opts, "mismatch_reflection.csv"),
              {"sqrt_cg:dimensionless", "sqrt_ch:dimensionless",
               "refl_sq:dimensionless", "oscillating:flag"});
  for (double a : scg) {
    for (double b : sch) {
      const MismatchPoint mp = mismatch_reflection(a * a, b * b, base);
      w.row({a, b, mp.oscillating ? std::numeric_limits<double>::quiet_NaN() : mp.refl_sq,
             static_cast<double>(mp.oscillating)});
    }
  }
  man.outputs.push_back(w.close());

  const double h = require_number(ms, "mismatch", "h");
  const double km = require_number(ms, "mismatch", "kappa_m");
  const auto ratios = linspace(require_number(ms, "mismatch", "ratio_min"),
                               require_number(ms, "mismatch", "ratio_max"),
                               static_cast<int>(require_number(ms, "mismatch", "ratio_points")));
  const double tol = number_or(cfg.section("quadrature"), "tol", 1e-9);
  const MismatchSweep sw = mismatch_enhancement_sweep(h, km, ratios, nullptr, tol);
  CsvWriter w2(out_path(opts, "mismatch_sweep.csv"),
               {"g_over_h:dimensionless", "enhancement:dimensionless", "oscillating:flag"});
  for (std::size_t i = 0; i < sw.g_over_h.size(); ++i) {
    w2.row({sw.g_over_h[i], sw.e[i], static_cast<double>(sw.oscillating[i])});
  }
  man.outputs.push_back(w2.close());
}

std::pair<double, double> band_from_config(const Config& cfg) {
  const json& cj = cfg.section("circuit");
  if (!cj.contains("band_ghz") || !cj.at("band_ghz").is_array() ||
      cj.at("band_ghz").size() != 2) {
    throw Error(ErrorKind::config, "missing key: circuit.band_ghz");
  }
  const double lo = 2.0 * kPi * 1e9 * cj.at("band_ghz").at(0).get<double>();
  const double hi = 2.0 * kPi * 1e9 * cj.at("band_ghz").at(1).get<double>();
  return {lo, hi};
}

void catalog_to_outputs(const ModeCatalog& cat, const InteractionRates* rates,
                        const RunOptions& opts, RunManifest& man) {
  json cj;
  cj["p_a"] = cat.p_a;
  cj["fsr_rad_s"] = cat.fsr;
  cj["delta_ca_rad_s"] = cat.delta_ca;
  cj["delta_da_rad_s"] = cat.delta_da;
  cj["kappa_m_readout_rad_s"] = cat.kappa_m_readout;
  cj["a_index"] = cat.a_index;
  cj["b_index"] = cat.b_index;
  cj["c_index"] = cat.c_index;
  cj["d_index"] = cat.d_index;
  cj["modes"] = json::array();
  for (const NormalMode& m : cat.modes) {
    const char* label = m.label == NormalMode::Label::A   ? "A"
                        : m.label == NormalMode::Label::B ? "B"
                                                          : "TL";
    cj["modes"].push_back({{"omega_rad_s", m.omega},
                           {"z_eff_a_ohm", m.z_eff_a},
                           {"z_eff_b_ohm", m.z_eff_b},
                           {"z_eff_tl_ohm", m.z_eff_tl},
                           {"q", std::isfinite(m.q) ? m.q : -1.0},
                           {"kappa_rad_s", m.kappa},
                           {"label", label}});
  }
  const std::string path = out_path(opts, "catalog.json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write output file: " + path);
  out << cj.dump(2) << "\n";
  man.outputs.push_back({path, cat.modes.size(), 1});

  CsvWriter w(out_path(opts, "modes.csv"),
              {"omega:rad_s", "freq:GHz", "z_eff_a:ohm", "z_eff_b:ohm", "z_eff_tl:ohm",
               "q:dimensionless", "kappa:rad_s", "g_ib:rad_s", "h_ib:rad_s"});
  for (std::size_t i = 0; i < cat.modes.size(); ++i) {
    const NormalMode& m = cat.modes[i];
    double g = 0.0, h = 0.0;
    if (rates != nullptr) {
      for (const auto& r : rates->rows) {
        if (std::abs(r.omega - m.omega) < 1e-9 * m.omega) {
          g = r.g;
          h = r.h;
          break;
        }
      }
    }
    w.row({m.omega, m.omega / (2.0 * kPi * 1e9), m.z_eff_a, m.z_eff_b, m.z_eff_tl,
           std::isfinite(m.q) ? m.q : -1.0, m.kappa, g, h});
  }
  man.outputs.push_back(w.close());
}

void cmd_circuit(const Config& cfg, const RunOptions& opts, RunManifest& man) {
  const CircuitSpec spec = circuit_from_config(cfg);
  const auto [lo, hi] = band_from_config(cfg);
  const DriveSpec drive = drive_from_config(cfg);
  const ModeCatalog cat = build_catalog(
      spec, lo, hi, BridgeSetting::renormalized(spec.readout.l0, drive));
  const InteractionRates rates = interaction_rates(cat, spec, drive);
  catalog_to_outputs(cat, &rates, opts, man);
}

FourModeParams four_mode_params_from_config(const Config& cfg, const RunOptions& opts) {
  const json& fm = cfg.section("four_mode");
  if (fm.contains("g_ab")) {
    // Explicit parameter set; bypasses the circuit.
    FourModeParams p;
    p.kappa_l = number_or(fm, "kappa_l", 1.0);
    p.kappa_m = require_number(fm, "four_mode", "kappa_m");
    p.kappa_a = number_or(fm, "kappa_a", 1e-6);
    p.kappa_c_mode = number_or(fm, "kappa_c_mode", 1.0);
    p.kappa_d_mode = number_or(fm, "kappa_d_mode", 1.0);
    p.g_ab = require_number(fm, "four_mode", "g_ab");
    p.h_ab = require_number(fm, "four_mode", "h_ab");
    p.g_cb = number_or(fm, "g_cb", 0.0);
    p.h_cb = number_or(fm, "h_cb", 0.0);
    p.g_db = number_or(fm, "g_db", 0.0);
    p.h_db = number_or(fm, "h_db", 0.0);
    p.delta_ca = number_or(fm, "delta_ca", -1500.0);
    p.delta_da = number_or(fm, "delta_da", 1500.0);
    p.phi = number_or(fm, "phi", 0.0);
    p.n_t = number_or(fm, "n_t", 0.0);
    p.n_a = number_or(fm, "n_a", 1.0);
    p.p_a = number_or(fm, "p_a", 1.0);
    p.validate();
    return p;
  }
  const CircuitSpec spec = circuit_from_config(cfg);
  const auto [lo, hi] = band_from_config(cfg);
  const DriveSpec drive = drive_from_config(cfg);
  CircuitSweepConfig scfg;
  scfg.drive = drive;
  scfg.band_lo = lo;
  scfg.band_hi = hi;
  scfg.n_t = number_or(fm, "n_t", 0.0);
  scfg.n_a = number_or(fm, "n_a", 1.0);
  scfg.kappa_a_ratio = number_or(fm, "kappa_a", 1e-6);
  scfg.threads = opts.threads;
  const ModeCatalog cat =
      build_catalog(spec, lo, hi, BridgeSetting::renormalized(spec.readout.l0, drive));
  const InteractionRates rates = interaction_rates(cat, spec, drive);
  return four_mode_from_circuit(spec, cat, rates, scfg);
}

void cmd_four_mode(const Config& cfg, const RunOptions& opts, RunManifest& man) {
  const FourModeParams p = four_mode_params_from_config(cfg, opts);
  const json& grid = cfg.section("grid");
  const auto omegas = linspace(require_number(grid, "grid", "omega_min"),
                               require_number(grid, "grid", "omega_max"),
                               static_cast<int>(require_number(grid, "grid", "points")));
  const double theta = amplified_quadrature_angle(p);
  const auto kp = four_mode_kernel_params(p, theta);
  std::vector<double> alpha_sq(omegas.size());
  kernels::alpha4_sq(omegas.data(), alpha_sq.data(), omegas.size(), kp);

  CsvWriter w(out_path(opts, "four_mode_visibility.csv"),
              {"omega:kappa_l", "alpha4:dimensionless"});
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    w.row({omegas[i], std::sqrt(std::max(0.0, alpha_sq[i]))});
  }
  man.outputs.push_back(w.close());

  const double tol = number_or(cfg.section("quadrature"), "tol", 1e-9);
  const EnhancementResult e = enhancement4(p, tol);
  CsvWriter we(out_path(opts, "four_mode_enhancement.csv"),
               {"enhancement:dimensionless", "integral_cf:kappa_l", "integral_std:kappa_l",
                "window:kappa_l", "est_rel_error:dimensionless", "p_a:dimensionless",
                "theta_amplified:rad"});
  we.row({e.value, e.integral_cf, e.integral_std, e.integration_window, e.est_rel_error,
          p.p_a, theta});
  man.outputs.push_back(we.close());
}

void cmd_fsr_sweep(const Config& cfg, const RunOptions& opts, RunManifest& man) {
  const CircuitSpec spec = circuit_from_config(cfg);
  const auto [lo, hi] = band_from_config(cfg);
  const json& fs_cfg = cfg.section("fsr_sweep");
  CircuitSweepConfig scfg;
  scfg.drive = drive_from_config(cfg);
  scfg.band_lo = lo;
  scfg.band_hi = hi;
  const json& fm = cfg.section("four_mode");
  scfg.n_t = number_or(fm, "n_t", 0.0);
  scfg.n_a = number_or(fm, "n_a", 1.0);
  scfg.kappa_a_ratio = number_or(fm, "kappa_a", 1e-6);
  scfg.rel_tol = number_or(cfg.section("quadrature"), "tol", 1e-9);
  scfg.threads = opts.threads;

  const ModeCatalog base = build_catalog(
      spec, lo, hi, BridgeSetting::renormalized(spec.readout.l0, scfg.drive));
  const double span = number_or(fs_cfg, "delta_span_fsr", 0.9);
  const int pts = static_cast<int>(require_number(fs_cfg, "fsr_sweep", "delta_points"));
  const auto deltas = linspace(-0.5 * span * base.fsr, 0.5 * span * base.fsr, pts);

  const DetuningSweep sw = detuning_sweep_circuit(spec, deltas, scfg);
  CsvWriter w(out_path(opts, "fsr_detuning.csv"),
              {"delta_a:rad_s", "delta_a:MHz", "enhancement:dimensionless", "flagged:flag"});
  for (std::size_t i = 0; i < sw.delta_a.size(); ++i) {
    w.row({sw.delta_a[i], sw.delta_a[i] / (2.0 * kPi * 1e6), sw.e[i],
           static_cast<double>(sw.flagged[i])});
  }
  man.outputs.push_back(w.close());

  const double window_mhz = number_or(fs_cfg, "window_mhz", 100.0);
  CsvWriter ws(out_path(opts, "fsr_summary.csv"),
               {"peak_delta:rad_s", "peak_enhancement:dimensionless",
                "window_average:dimensionless", "window:MHz", "fsr:MHz"});
  ws.row({sw.peak_delta, sw.peak_e,
          sw.window_average(0.5 * window_mhz * 2.0 * kPi * 1e6), window_mhz,
          base.fsr / (2.0 * kPi * 1e6)});
  man.outputs.push_back(ws.close());

  std::vector<double> lengths;
  for (const auto& v : fs_cfg.at("lengths_cm")) {
    lengths.push_back(v.get<double>() * 1e-2);
  }
  const LengthSweep ls = length_sweep(spec, lengths, deltas, scfg);
  CsvWriter wl(out_path(opts, "fsr_lengths.csv"),
               {"length:m", "fsr:MHz", "freq:GHz", "enhancement:dimensionless",
                "flagged:flag"});
  for (const auto& row : ls.rows) {
    for (std::size_t i = 0; i < row.freq.size(); ++i) {
      wl.row({row.length, row.fsr / (2.0 * kPi * 1e6), row.freq[i] / (2.0 * kPi * 1e9),
              row.e[i], static_cast<double>(row.flagged[i])});
    }
  }
  man.outputs.push_back(wl.close());

  std::vector<double> env_f, env_e;
  ls.envelope(env_f, env_e);
  CsvWriter wenv(out_path(opts, "fsr_envelope.csv"),
                 {"freq:GHz", "enhancement:dimensionless"});
  for (std::size_t i = 0; i < env_f.size(); ++i) {
    wenv.row({env_f[i] / (2.0 * kPi * 1e9), env_e[i]});
  }
  man.outputs.push_back(wenv.close());
}

}  // namespace

RunManifest run(const std::string& command, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const Config cfg = load_config(opts.config_path);

  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec) {
    throw Error(ErrorKind::io, "cannot create output directory: " + opts.out_dir);
  }

  RunManifest man;
  man.command = command;
  man.version = kVersion;
  man.parameters = cfg.resolved;
  man.parameters["_run"] = {{"threads", opts.threads}, {"seed", opts.seed}};
  man.config_digest = config_digest(cfg.resolved);

  if (command == "two-mode") {
    cmd_two_mode(cfg, opts, man);
  } else if (command == "scan-map") {
    cmd_scan_map(cfg, opts, man);
  } else if (command == "mismatch") {
    cmd_mismatch(cfg, opts, man);
  } else if (command == "circuit") {
    cmd_circuit(cfg, opts, man);
  } else if (command == "four-mode") {
    cmd_four_mode(cfg, opts, man);
  } else if (command == "fsr-sweep") {
    cmd_fsr_sweep(cfg, opts, man);
  } else {
    throw Error(ErrorKind::config, "unknown subcommand: " + command);
  }

  man.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string mpath = (fs::path(opts.out_dir) / "manifest.json").string();
  std::ofstream out(mpath, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write manifest: " + mpath);
  out << man.to_json().dump(2) << "\n";
  return man;
}

}  // namespace ceasefire
