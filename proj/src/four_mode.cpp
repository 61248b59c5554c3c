#include "ceasefire/four_mode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ceasefire/detail/four_mode_math.hpp"
#include "ceasefire/linalg.hpp"
#include "ceasefire/parallel.hpp"

namespace ceasefire {

void FourModeParams::validate() const {
  if (!(kappa_l > 0.0)) {
    throw Error(ErrorKind::invalid_params, "kappa_l must be positive");
  }
  const double rates[] = {kappa_m, kappa_a, kappa_c_mode, kappa_d_mode,
                          g_ab, h_ab, g_cb, h_cb, g_db, h_db};
  for (double r : rates) {
    if (r < 0.0) throw Error(ErrorKind::invalid_params, "rates must be non-negative");
  }
  if (!(kappa_a < 1e-3 * kappa_l)) {
    throw Error(ErrorKind::invalid_params,
                "kappa_a must be << kappa_l (kappa_a < 1e-3 * kappa_l)");
  }
  if ((g_cb > 0.0 || h_cb > 0.0) && delta_ca == 0.0) {
    throw Error(ErrorKind::invalid_params, "delta_ca must be nonzero when C couples");
  }
  if ((g_db > 0.0 || h_db > 0.0) && delta_da == 0.0) {
    throw Error(ErrorKind::invalid_params, "delta_da must be nonzero when D couples");
  }
  if (!(p_a > 0.0 && p_a <= 1.0)) {
    throw Error(ErrorKind::invalid_params, "p_a must be in (0, 1]");
  }
  if (n_t < 0.0 || n_a < 0.0) {
    throw Error(ErrorKind::invalid_params, "occupancies must be non-negative");
  }
}

kernels::FourModeAlphaParams four_mode_kernel_params(const FourModeParams& p,
                                                     double theta) {
  kernels::FourModeAlphaParams kp;
  kp.kl = p.kappa_l;
  kp.km = p.kappa_m;
  kp.ka = p.kappa_a;
  kp.gab = p.g_ab;
  kp.hab = p.h_ab;
  kp.gj[0] = p.g_cb;
  kp.gj[1] = p.g_db;
  kp.hj[0] = p.h_cb;
  kp.hj[1] = p.h_db;
  kp.dja[0] = p.delta_ca;
  kp.dja[1] = p.delta_da;
  kp.kj[0] = p.kappa_c_mode;
  kp.kj[1] = p.kappa_d_mode;
  kp.phi = p.phi;
  kp.n_t = p.n_t;
  kp.n_a = p.n_a;
  kp.cos2t = std::cos(2.0 * theta);
  kp.sin2t = std::sin(2.0 * theta);
  return kp;
}

BetaGammaEta beta_gamma_eta(double omega, const FourModeParams& p) {
  const auto kp = four_mode_kernel_params(p, 0.0);
  const auto cp = detail::four_mode_core(omega, kp);
  const auto cm = detail::four_mode_core(-omega, kp);
  BetaGammaEta r;
  r.beta = cp.beta;
  r.gamma = cp.gamma;
  r.beta_conj_neg = std::conj(cm.beta);
  r.gamma_conj_neg = std::conj(cm.gamma);
  r.eta = r.beta * r.beta_conj_neg - r.gamma * r.gamma_conj_neg;
  const double scale = std::abs(r.beta) * std::abs(r.beta_conj_neg) +
                       std::abs(r.gamma) * std::abs(r.gamma_conj_neg) +
                       std::pow(p.kappa_l, 4);
  if (std::abs(r.eta) < 1e-12 * scale) {
    throw Error(ErrorKind::parametric_divergence,
                "parametric divergence: |eta(omega)| below threshold");
  }
  return r;
}

namespace {

Zeta4Row row_from_array(double omega, const std::array<cplx, 10>& z) {
  Zeta4Row r;
  r.omega = omega;
  r.zeta_ma = z[0];
  r.zeta_ml = z[1];
  r.zeta_mc = z[2];
  r.zeta_md = z[3];
  r.zeta_mm = z[4];
  r.zeta_mm_dag = z[5];
  r.zeta_md_dag = z[6];
  r.zeta_mc_dag = z[7];
  r.zeta_ml_dag = z[8];
  r.zeta_ma_dag = z[9];
  return r;
}

}  // namespace

Zeta4Row zeta4(double omega, const FourModeParams& p) {
  p.validate();
  beta_gamma_eta(omega, p);  // divergence check
  const auto kp = four_mode_kernel_params(p, 0.0);
  const auto cp = detail::four_mode_core(omega, kp);
  const auto cm = detail::four_mode_core(-omega, kp);
  const auto z =
      detail::four_mode_row(kp, cp, std::conj(cm.beta), std::conj(cm.gamma));
  return row_from_array(omega, z);
}

Zeta10 zeta10_oracle(double omega, const FourModeParams& p) {
  p.validate();
  // Unknowns: [A, C, D, B, B+, D+, C+, A+] at the closed set of frequencies.
  const cplx d_a(0.5 * p.kappa_l, omega);
  const cplx d_b(0.5 * p.kappa_m, omega);
  const cplx d_c(0.5 * p.kappa_c_mode, omega + p.delta_ca);
  const cplx d_d(0.5 * p.kappa_d_mode, omega + p.delta_da);
  const cplx d_cbar(0.5 * p.kappa_c_mode, omega - p.delta_ca);
  const cplx d_dbar(0.5 * p.kappa_d_mode, omega - p.delta_da);
  const cplx ep = std::polar(1.0, p.phi);
  const cplx em = std::conj(ep);

  const cplx iga = kI * p.g_ab, igc = kI * p.g_cb, igd = kI * p.g_db;
  const cplx iha_p = kI * p.h_ab * ep, ihc_p = kI * p.h_cb * ep, ihd_p = kI * p.h_db * ep;
  const cplx iha_m = kI * p.h_ab * em, ihc_m = kI * p.h_cb * em, ihd_m = kI * p.h_db * em;

  constexpr cplx O{0.0, 0.0};
  // Row order: A, C, D, B, B+, D+, C+, A+. Creation-side rows couple back to
  // the readout pair (B, B+) only.
  const std::array<cplx, 64> sys{
      d_a,    O,      O,      iga,    iha_p, O,      O,      O,       // A
      O,      d_c,    O,      igc,    ihc_p, O,      O,      O,       // C
      O,      O,      d_d,    igd,    ihd_p, O,      O,      O,       // D
      iga,    igc,    igd,    d_b,    O,     ihd_p,  ihc_p,  iha_p,   // B
      -iha_m, -ihc_m, -ihd_m, O,      d_b,   -igd,   -igc,   -iga,    // B+
      O,      O,      O,      -ihd_m, -igd,  d_dbar, O,      O,       // D+
      O,      O,      O,      -ihc_m, -igc,  O,      d_cbar, O,       // C+
      O,      O,      O,      -iha_m, -iga,  O,      O,      d_a};    // A+

  const double ska = std::sqrt(p.kappa_a);
  const double skl = std::sqrt(p.kappa_l);
  const double skc = std::sqrt(p.kappa_c_mode);
  const double skd = std::sqrt(p.kappa_d_mode);
  const double skm = std::sqrt(p.kappa_m);

  // Input couplings: unknown row driven by each of the ten input fields.
  struct Drive {
    int row;
    double amp;
  };
  const std::array<Drive, 10> drives{{{0, ska},   // xi_a   -> A
                                      {0, skl},   // xi_l   -> A
                                      {1, skc},   // xi_C   -> C
                                      {2, skd},   // xi_D   -> D
                                      {3, skm},   // xi_m   -> B
                                      {4, skm},   // xi_m+  -> B+
                                      {5, skd},   // xi_D+  -> D+
                                      {6, skc},   // xi_C+  -> C+
                                      {7, skl},   // xi_l+  -> A+
                                      {7, ska}}};  // xi_a+  -> A+

  // Output projections: v_i = u_i - amp * X_row.
  const std::array<Drive, 10> outs{{{0, ska},
                                    {0, skl},
                                    {1, skc},
                                    {2, skd},
                                    {3, skm},
                                    {4, skm},
                                    {5, skd},
                                    {6, skc},
                                    {7, skl},
                                    {7, ska}}};

  Zeta10 z;
  for (int j = 0; j < 10; ++j) {
    std::array<cplx, 64> a = sys;
    std::array<cplx, 8> x{};
    x[static_cast<std::size_t>(drives[static_cast<std::size_t>(j)].row)] =
        drives[static_cast<std::size_t>(j)].amp;
    linalg::solve_inplace<8>(a, x);
    for (int i = 0; i < 10; ++i) {
      const auto& o = outs[static_cast<std::size_t>(i)];
      z[static_cast<std::size_t>(10 * i + j)] =
          (i == j ? 1.0 : 0.0) - o.amp * x[static_cast<std::size_t>(o.row)];
    }
  }
  return z;
}

Zeta4Row eom_oracle4(double omega, const FourModeParams& p) {
  const Zeta10 z = zeta10_oracle(omega, p);
  std::array<cplx, 10> row;
  for (int j = 0; j < 10; ++j) row[static_cast<std::size_t>(j)] = z[40 + static_cast<std::size_t>(j)];
  return row_from_array(omega, row);
}

OutputPsd4 output_psd4(double omega, double theta, const FourModeParams& p) {
  p.validate();
  const auto kp = four_mode_kernel_params(p, theta);
  const auto cp = detail::four_mode_core(omega, kp);
  const auto cm = detail::four_mode_core(-omega, kp);
  const auto z2 = detail::four_mode_row(kp, cp, std::conj(cm.beta),
                                        std::conj(cm.gamma));
  const auto z2m = detail::four_mode_row(kp, cm, std::conj(cp.beta),
                                         std::conj(cp.gamma));
  std::array<cplx, 10> z3;
  for (int k = 0; k < 10; ++k) z3[static_cast<std::size_t>(k)] = std::conj(z2m[static_cast<std::size_t>(9 - k)]);

  const double occ_noise[10] = {0.0,         p.n_t,       p.n_t,       p.n_t,
                                p.n_t,       p.n_t + 1.0, p.n_t + 1.0, p.n_t + 1.0,
                                p.n_t + 1.0, 1.0};
  double s22 = 0.0, s33 = 0.0;
  cplx s32{};
  for (int k = 0; k < 10; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    s22 += occ_noise[k] * std::norm(z2[ku]);
    s33 += occ_noise[k] * std::norm(z3[ku]);
    s32 += occ_noise[k] * std::conj(z3[ku]) * z2[ku];
  }
  const double a22 = std::norm(z2[0]) + std::norm(z2[9]);
  const double a33 = std::norm(z3[0]) + std::norm(z3[9]);
  const cplx a32 = std::conj(z3[0]) * z2[0] + std::conj(z3[9]) * z2[9];

  OutputPsd4 out;
  out.s_noise = 0.5 * (s22 + s33) -
                (kp.cos2t * s32.real() + kp.sin2t * s32.imag());
  out.s_axion = p.n_a * (0.5 * (a22 + a33) -
                         (kp.cos2t * a32.real() + kp.sin2t * a32.imag()));
  return out;
}

double amplified_quadrature_angle(const FourModeParams& p) {
  const auto kp = four_mode_kernel_params(p, 0.0);
  const auto cp = detail::four_mode_core(0.0, kp);
  const auto z2 = detail::four_mode_row(kp, cp, std::conj(cp.beta),
                                        std::conj(cp.gamma));
  std::array<cplx, 10> z3;
  for (int k = 0; k < 10; ++k) z3[static_cast<std::size_t>(k)] = std::conj(z2[static_cast<std::size_t>(9 - k)]);
  const cplx a32 = std::conj(z3[0]) * z2[0] + std::conj(z3[9]) * z2[9];
  double theta;
  if (std::abs(a32) < 1e-300) {
    theta = 0.5 * p.phi;
  } else {
    // S_a(0, theta) = const - |a32| cos(arg(a32) - 2 theta + pi).
    theta = 0.5 * (std::arg(a32) - kPi);
  }
  theta = std::fmod(theta, kPi);
  if (theta < 0.0) theta += kPi;
  return theta;
}

bool four_mode_oscillating(const FourModeParams& p) {
  const auto kp = four_mode_kernel_params(p, 0.0);
  const auto c0 = detail::four_mode_core(0.0, kp);
  if (c0.beta.real() <= 0.0) return true;
  const double eta0 = std::norm(c0.beta) - std::norm(c0.gamma);
  return eta0 <= 0.0;
}

EnhancementResult enhancement4(const FourModeParams& p, double rel_tol) {
  p.validate();
  if (!(rel_tol > 1e-12 && rel_tol <= 1e-7)) {
    throw Error(ErrorKind::invalid_params,
                "enhancement tolerance must lie in (1e-12, 1e-7] so accepted "
                "results stay below the 1e-6 error bound");
  }
  if (four_mode_oscillating(p)) {
    throw Error(ErrorKind::parametric_divergence,
                "parametric divergence: past the oscillation threshold");
  }

  const double theta = amplified_quadrature_angle(p);
  const auto kp = four_mode_kernel_params(p, theta);
  auto cf_fn = [&kp](const double* x, double* y, std::size_t n) {
    kernels::alpha4_sq(x, y, n, kp);
  };

  double seed = 50.0 * std::max(p.kappa_l, p.kappa_m);
  if (p.kappa_m > 0.0) seed = std::max(seed, 50.0 * 4.0 * p.g_ab * p.g_ab / p.kappa_m);
  // The line modes imprint narrow features at +/- their detunings; pin panel
  // boundaries around them.
  std::vector<double> bps;
  for (double d : {p.delta_ca, p.delta_da}) {
    for (double s : {-1.0, 1.0}) {
      const double c = s * d;
      const double k = std::max(p.kappa_c_mode, p.kappa_d_mode);
      bps.push_back(c - 5.0 * k);
      bps.push_back(c);
      bps.push_back(c + 5.0 * k);
    }
  }
  seed = std::max(seed, 2.0 * std::max(std::abs(p.delta_ca), std::abs(p.delta_da)));

  const IntegralResult num = integrate_alpha_sq_batch(cf_fn, rel_tol, seed, bps);

  const TwoModeParams std_ref(p.kappa_l, p.kappa_m, 0.0, 0.0, p.kappa_a, p.n_a, p.n_t);
  const auto std_kp = std_kernel_params(2.0 * p.kappa_l, std_ref);
  auto std_fn = [&std_kp](const double* x, double* y, std::size_t n) {
    kernels::alpha_std_sq(x, y, n, std_kp);
  };
  const IntegralResult den =
      integrate_alpha_sq_batch(std_fn, rel_tol, 50.0 * p.kappa_l);

  EnhancementResult r;
  r.integral_cf = num.value;
  r.integral_std = den.value;
  r.value = p.p_a * p.p_a * num.value / den.value;
  r.integration_window = num.window;
  r.est_rel_error = num.est_rel_error + den.est_rel_error;
  if (!(r.est_rel_error < 1e-6)) {
    throw Error(ErrorKind::quadrature, "enhancement error estimate above the acceptance bound");
  }
  return r;
}

double DetuningSweep::window_average(double halfwidth) const {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < delta_a.size(); ++i) {
    if (flagged[i] || !(std::abs(delta_a[i]) <= halfwidth)) continue;
    sum += e[i];
    ++count;
  }
  return count > 0 ? sum / count : 0.0;
}

namespace {

void finalize_peak(DetuningSweep& sw) {
  sw.peak_e = -1.0;
  for (std::size_t i = 0; i < sw.e.size(); ++i) {
    if (!sw.flagged[i] && sw.e[i] > sw.peak_e) {
      sw.peak_e = sw.e[i];
      sw.peak_delta = sw.delta_a[i];
    }
  }
}

}  // namespace

DetuningSweep detuning_sweep(const FourModeParams& p_template,
                             std::span<const double> delta_a_grid, double fsr,
                             double gap_halfwidth, double rel_tol, int threads) {
  if (delta_a_grid.empty() || !(fsr > 0.0)) {
    throw Error(ErrorKind::invalid_params, "detuning grid and fsr must be non-trivial");
  }
  if (gap_halfwidth < 0.0) gap_halfwidth = 0.05 * fsr;

  DetuningSweep sw;
  sw.delta_a.assign(delta_a_grid.begin(), delta_a_grid.end());
  sw.e.assign(sw.delta_a.size(), std::numeric_limits<double>::quiet_NaN());
  sw.flagged.assign(sw.delta_a.size(), 0);

  parallel_for(sw.delta_a.size(), threads, [&](std::size_t i) {
    const double d = sw.delta_a[i];
    FourModeParams p = p_template;
    p.delta_ca = -0.5 * fsr - d;
    p.delta_da = 0.5 * fsr - d;
    if (std::abs(p.delta_ca) < gap_halfwidth || std::abs(p.delta_da) < gap_halfwidth) {
      sw.flagged[i] = 1;
      return;
    }
    try {
      sw.e[i] = enhancement4(p, rel_tol).value;
    } catch (const Error&) {
      sw.flagged[i] = 1;
    }
  });
  finalize_peak(sw);
  return sw;
}

FourModeParams four_mode_from_circuit(const CircuitSpec& /*spec*/, const ModeCatalog& catalog,
                                      const InteractionRates& rates,
                                      const CircuitSweepConfig& cfg) {
  if (rates.a_row < 0 || rates.c_row < 0 || rates.d_row < 0) {
    throw Error(ErrorKind::no_mode_in_band, "rates table is missing labeled modes");
  }
  const double kl = catalog.a_mode().kappa;
  if (!(kl > 0.0)) {
    throw Error(ErrorKind::invalid_params,
                "cavity mode is lossless; kappa_l unit undefined");
  }
  FourModeParams p;
  p.kappa_l = 1.0;
  p.kappa_m = catalog.kappa_m_readout / kl;
  p.kappa_a = cfg.kappa_a_ratio;
  p.kappa_c_mode = 1.0;  // line modes modeled with the cavity loss rate
  p.kappa_d_mode = 1.0;
  const auto& ra = rates.rows[static_cast<std::size_t>(rates.a_row)];
  const auto& rc = rates.rows[static_cast<std::size_t>(rates.c_row)];
  const auto& rd = rates.rows[static_cast<std::size_t>(rates.d_row)];
  p.g_ab = ra.g / kl;
  p.h_ab = ra.h / kl;
  p.g_cb = rc.g / kl;
  p.h_cb = rc.h / kl;
  p.g_db = rd.g / kl;
  p.h_db = rd.h / kl;
  p.delta_ca = catalog.delta_ca / kl;
  p.delta_da = catalog.delta_da / kl;
  p.phi = cfg.drive.phi;
  p.n_t = cfg.n_t;
  p.n_a = cfg.n_a;
  p.p_a = catalog.p_a;
  p.validate();
  return p;
}

namespace {

// Retune the bare cavity (scaling L_A and C_A together, preserving the
// characteristic impedance) until the cataloged A-mode frequency lands on
// target.
struct TunedPoint {
  CircuitSpec spec;
  ModeCatalog catalog;
};

TunedPoint retune_cavity(const CircuitSpec& spec0, double omega_target,
                         const CircuitSweepConfig& cfg, const BridgeSetting& bridge) {
  CircuitSpec s = spec0;
  ModeCatalog cat = build_catalog(s, cfg.band_lo, cfg.band_hi, bridge);
  for (int it = 0; it < 12; ++it) {
    const double wa = cat.a_mode().omega;
    if (std::abs(wa - omega_target) <= 1e-9 * omega_target) break;
    // omega ~ 1/sqrt(LC); damp the step if it lands in a crossing region.
    double step = wa / omega_target;
    bool moved = false;
    for (int attempt = 0; attempt < 4 && !moved; ++attempt) {
      CircuitSpec trial = s;
      trial.cavity.l_a *= step;
      trial.cavity.c_a *= step;
      try {
        ModeCatalog c2 = build_catalog(trial, cfg.band_lo, cfg.band_hi, bridge);
        s = trial;
        cat = std::move(c2);
        moved = true;
      } catch (const Error&) {
        step = std::sqrt(step);
      }
    }
    if (!moved) {
      throw Error(ErrorKind::avoided_crossing,
                  "cavity retuning blocked by an avoided crossing");
    }
  }
  return {s, cat};
}

}  // namespace

DetuningSweep detuning_sweep_circuit(const CircuitSpec& spec,
                                     std::span<const double> delta_a_grid,
                                     const CircuitSweepConfig& cfg) {
  if (delta_a_grid.empty()) {
    throw Error(ErrorKind::invalid_params, "detuning grid must be non-empty");
  }
  const BridgeSetting bridge =
      BridgeSetting::renormalized(spec.readout.l0, cfg.drive);
  const ModeCatalog base = build_catalog(spec, cfg.band_lo, cfg.band_hi, bridge);
  const double mid = 0.5 * (base.a_mode().omega + base.delta_ca +
                            base.a_mode().omega + base.delta_da);

  DetuningSweep sw;
  sw.delta_a.assign(delta_a_grid.begin(), delta_a_grid.end());
  sw.e.assign(sw.delta_a.size(), std::numeric_limits<double>::quiet_NaN());
  sw.flagged.assign(sw.delta_a.size(), 0);

  parallel_for(sw.delta_a.size(), cfg.threads, [&](std::size_t i) {
    try {
      const TunedPoint pt = retune_cavity(spec, mid + sw.delta_a[i], cfg, bridge);
      const InteractionRates rates = rates_from_catalog(pt.catalog, pt.spec, cfg.drive);
      const FourModeParams p = four_mode_from_circuit(pt.spec, pt.catalog, rates, cfg);
      sw.e[i] = enhancement4(p, cfg.rel_tol).value;
    } catch (const Error&) {
      sw.flagged[i] = 1;
    }
  });
  finalize_peak(sw);
  return sw;
}

void LengthSweep::envelope(std::vector<double>& freq, std::vector<double>& e) const {
  freq.clear();
  e.clear();
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.freq.size(); ++i) {
      if (row.flagged[i]) continue;
      freq.push_back(row.freq[i]);
      e.push_back(row.e[i]);
    }
  }
  std::vector<std::size_t> idx(freq.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return freq[a] < freq[b]; });
  std::vector<double> f2, e2;
  f2.reserve(idx.size());
  e2.reserve(idx.size());
  for (std::size_t i : idx) {
    if (!f2.empty() && freq[i] - f2.back() < 1e-9 * freq[i]) {
      e2.back() = std::max(e2.back(), e[i]);
    } else {
      f2.push_back(freq[i]);
      e2.push_back(e[i]);
    }
  }
  freq = std::move(f2);
  e = std::move(e2);
}

LengthSweep length_sweep(const CircuitSpec& spec, std::span<const double> lengths,
                         std::span<const double> delta_a_grid,
                         const CircuitSweepConfig& cfg) {
  if (lengths.empty()) {
    throw Error(ErrorKind::invalid_params, "length list must be non-empty");
  }
  const double z0 = std::sqrt(spec.ladder.l_cell / spec.ladder.c_cell);
  LengthSweep out;
  for (double len : lengths) {
    if (!(len > 0.0)) {
      throw Error(ErrorKind::invalid_params, "lengths must be positive");
    }
    CircuitSpec s = CircuitSpec::from_geometry(
        spec.cavity, spec.readout, z0, len, spec.line.wave_speed, spec.ladder.cells);
    LengthSweepRow row;
    row.length = len;
    const BridgeSetting bridge = BridgeSetting::renormalized(s.readout.l0, cfg.drive);
    // Changing the length moves the line modes; if the cavity lands inside an
    // avoided crossing, nudge it off before the sweep establishes its own
    // midpoint-relative grid.
    ModeCatalog base;
    bool operable = false;
    for (int attempt = 0; attempt < 16 && !operable; ++attempt) {
      try {
        base = build_catalog(s, cfg.band_lo, cfg.band_hi, bridge);
        operable = true;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::avoided_crossing || attempt == 15) throw;
        const double dir = (attempt % 2 == 0) ? 1.0 : -1.0;
        const double mag = 1.0 + 0.005 * (attempt / 2 + 1) * dir;
        s.cavity.l_a *= mag;
        s.cavity.c_a *= mag;
      }
    }
    row.fsr = base.fsr;
    const double mid = base.a_mode().omega + 0.5 * (base.delta_ca + base.delta_da);
    const DetuningSweep sw = detuning_sweep_circuit(s, delta_a_grid, cfg);
    row.freq.resize(sw.delta_a.size());
    for (std::size_t i = 0; i < sw.delta_a.size(); ++i) row.freq[i] = mid + sw.delta_a[i];
    row.e = sw.e;
    row.flagged = sw.flagged;
    row.peak_e = sw.peak_e;
    row.peak_freq = mid + sw.peak_delta;
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace ceasefire
