#include "ceasefire/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ceasefire/kernels.hpp"

namespace ceasefire {

void CircuitSpec::validate() const {
  auto pos = [](double v, const char* what) {
    if (!(v > 0.0)) {
      throw Error(ErrorKind::invalid_params,
                  std::string("circuit element must be positive: ") + what);
    }
  };
  pos(cavity.l_a, "cavity.l_a");
  pos(cavity.c_a, "cavity.c_a");
  pos(cavity.c_c, "cavity.c_c");
  pos(readout.l0, "readout.l0");
  pos(readout.c_b, "readout.c_b");
  pos(ladder.l_cell, "ladder.l_cell");
  pos(ladder.c_cell, "ladder.c_cell");
  pos(line.length, "line.length");
  pos(line.wave_speed, "line.wave_speed");
  if (ladder.cells < 2) {
    throw Error(ErrorKind::invalid_params, "ladder needs at least 2 cells");
  }
  // Cell values must reproduce the line delay.
  const double delay = line.length / line.wave_speed;
  const double cell_delay = std::sqrt(ladder.l_cell * ladder.c_cell);
  if (std::abs(ladder.cells * cell_delay - delay) > 1e-6 * delay) {
    throw Error(ErrorKind::invalid_params,
                "ladder cells inconsistent with line length and wave speed");
  }
}

CircuitSpec CircuitSpec::from_geometry(const CavitySpec& cavity, const ReadoutSpec& readout,
                                       double z0, double length, double wave_speed,
                                       int cells) {
  const double delay = length / wave_speed;
  CircuitSpec s;
  s.cavity = cavity;
  s.readout = readout;
  s.line = {length, wave_speed};
  s.ladder.cells = cells;
  s.ladder.l_cell = z0 * delay / cells;
  s.ladder.c_cell = delay / (z0 * cells);
  s.validate();
  return s;
}

double CircuitSpec::cavity_char_impedance() const {
  return std::sqrt(cavity.l_a / cavity.c_a);
}

double CircuitSpec::fsr_nominal() const {
  return kPi * line.wave_speed / line.length;
}

void DriveSpec::validate() const {
  if (ell_delta < 0.0 || ell_sigma < 0.0) {
    throw Error(ErrorKind::invalid_params, "modulation amplitudes must be non-negative");
  }
  if (!(ell_delta + ell_sigma < 1.0)) {
    throw Error(ErrorKind::invalid_params,
                "total fractional modulation must stay below 1 (inductances positive)");
  }
}

namespace {

inline cplx shunt_c(double omega, double c) { return cplx(0.0, omega * c); }
inline cplx series_l(double omega, double l) { return cplx(0.0, omega * l); }

inline cplx cavity_node_admittance(const CircuitSpec& s, double omega) {
  cplx y = shunt_c(omega, s.cavity.c_a) + 1.0 / series_l(omega, s.cavity.l_a);
  if (s.cavity.r_a > 0.0) y += 1.0 / s.cavity.r_a;
  return y;
}

inline cplx readout_node_admittance(const CircuitSpec& s, double omega) {
  cplx y = shunt_c(omega, s.readout.c_b);
  if (s.readout.r_b > 0.0) y += 1.0 / s.readout.r_b;
  return y;
}

// Impedance looking into the T-junction from the line side (node tl), with
// the readout node hanging off the far arm.
inline cplx tjunction_from_line(const CircuitSpec& s, const BridgeSetting& b,
                                double omega) {
  const cplx z_b = 1.0 / readout_node_admittance(s, omega);
  const cplx z_arm = series_l(omega, b.arm);
  const cplx z_far = z_arm + z_b;
  const cplx z_stem = series_l(omega, b.stem);
  const cplx z_mid = (z_stem * z_far) / (z_stem + z_far);
  return z_arm + z_mid;
}

// Impedance looking from the readout node into the T-junction, with the line
// admittance y_line hanging off the near arm.
inline cplx tjunction_from_readout(const BridgeSetting& b, double omega, cplx y_line) {
  const cplx z_arm = series_l(omega, b.arm);
  const cplx z_far = z_arm + 1.0 / y_line;
  const cplx z_stem = series_l(omega, b.stem);
  const cplx z_mid = (z_stem * z_far) / (z_stem + z_far);
  return z_arm + z_mid;
}

}  // namespace

void port_admittance_batch(const CircuitSpec& spec, Port port,
                           std::span<const double> omegas, std::span<cplx> out,
                           const BridgeSetting& bridge) {
  const std::size_t n = omegas.size();
  if (out.size() != n) {
    throw Error(ErrorKind::invalid_params, "admittance output span size mismatch");
  }
  std::vector<double> yre(n), yim(n);
  const int cells = spec.ladder.cells;

  if (port == Port::a) {
    for (std::size_t i = 0; i < n; ++i) {
      const cplx y0 = 1.0 / tjunction_from_line(spec, bridge, omegas[i]);
      yre[i] = y0.real();
      yim[i] = y0.imag();
    }
    kernels::ladder_fold(omegas.data(), yre.data(), yim.data(), n,
                         spec.ladder.l_cell, spec.ladder.c_cell, cells);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = omegas[i];
      const cplx y_t0(yre[i], yim[i]);
      const cplx z = 1.0 / y_t0 + 1.0 / shunt_c(w, spec.cavity.c_c);
      out[i] = cavity_node_admittance(spec, w) + 1.0 / z;
    }
    return;
  }

  // Both remaining ports need the line folded from the cavity side up to the
  // last ladder node (series cell N applied, shunt at node N not included).
  for (std::size_t i = 0; i < n; ++i) {
    const double w = omegas[i];
    const cplx y_cav = cavity_node_admittance(spec, w);
    const cplx z_t0 = 1.0 / y_cav + 1.0 / shunt_c(w, spec.cavity.c_c);
    const cplx y1 = 1.0 / (z_t0 + series_l(w, spec.ladder.l_cell));
    yre[i] = y1.real();
    yim[i] = y1.imag();
  }
  kernels::ladder_fold(omegas.data(), yre.data(), yim.data(), n,
                       spec.ladder.l_cell, spec.ladder.c_cell, cells - 1);

  if (port == Port::tl) {
    for (std::size_t i = 0; i < n; ++i) {
      const double w = omegas[i];
      const cplx y_left(yre[i], yim[i]);
      out[i] = y_left + shunt_c(w, spec.ladder.c_cell) +
               1.0 / tjunction_from_line(spec, bridge, w);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double w = omegas[i];
      const cplx y_line = cplx(yre[i], yim[i]) + shunt_c(w, spec.ladder.c_cell);
      out[i] = readout_node_admittance(spec, w) +
               1.0 / tjunction_from_readout(bridge, w, y_line);
    }
  }
}

cplx port_admittance(const CircuitSpec& spec, Port port, double omega,
                     const BridgeSetting& bridge) {
  if (!(omega > 0.0)) {
    throw Error(ErrorKind::invalid_params, "admittance frequency must be positive");
  }
  cplx y;
  port_admittance_batch(spec, port, {&omega, 1}, {&y, 1}, bridge);
  if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) {
    throw Error(ErrorKind::singular_system,
                "singular network at omega = " + std::to_string(omega) +
                    " rad/s (admittance pole)");
  }
  return y;
}

namespace {

double im_y(const CircuitSpec& spec, Port port, double w, const BridgeSetting& b) {
  return port_admittance(spec, port, w, b).imag();
}

// Centered difference with one Richardson step at scale h.
double d_im_y_at(const CircuitSpec& spec, Port port, double w, double h,
                 const BridgeSetting& b) {
  const double d1 = (im_y(spec, port, w + h, b) - im_y(spec, port, w - h, b)) / (2.0 * h);
  const double d2 =
      (im_y(spec, port, w + 0.5 * h, b) - im_y(spec, port, w - 0.5 * h, b)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

// A mode weakly coupled to a port shows up there as a very narrow zero-pole
// pair; the step must shrink until the local slope is resolved.
double d_im_y(const CircuitSpec& spec, Port port, double w, const BridgeSetting& b) {
  double h = 1e-6 * w;
  double prev = d_im_y_at(spec, port, w, h, b);
  for (int level = 0; level < 4; ++level) {
    h *= 0.01;
    const double cur = d_im_y_at(spec, port, w, h, b);
    if (std::abs(cur - prev) <= 1e-4 * std::max(std::abs(cur), std::abs(prev))) {
      return cur;
    }
    prev = cur;
  }
  return prev;
}

double bisect_im_zero(const CircuitSpec& spec, Port port, double lo, double hi,
                      double flo, const BridgeSetting& b) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((hi - lo) <= 1e-12 * mid) return mid;
    const double fm = im_y(spec, port, mid, b);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<NormalMode> find_normal_modes(const CircuitSpec& spec, Port port,
                                          double band_lo, double band_hi,
                                          int grid_pts, const BridgeSetting& bridge) {
  spec.validate();
  if (!(band_lo > 0.0 && band_hi > band_lo)) {
    throw Error(ErrorKind::invalid_params, "scan band must be positive and ordered");
  }
  if (grid_pts < 16) {
    throw Error(ErrorKind::invalid_params, "scan grid too coarse");
  }

  std::vector<double> ws(static_cast<std::size_t>(grid_pts));
  for (int i = 0; i < grid_pts; ++i) {
    ws[static_cast<std::size_t>(i)] =
        band_lo + (band_hi - band_lo) * i / (grid_pts - 1);
  }
  std::vector<cplx> ys(ws.size());
  port_admittance_batch(spec, port, ws, ys, bridge);

  std::vector<std::pair<double, double>> brackets;  // rising zero crossings
  for (std::size_t i = 0; i + 1 < ws.size(); ++i) {
    const double f0 = ys[i].imag();
    const double f1 = ys[i + 1].imag();
    if (!std::isfinite(f0) || !std::isfinite(f1)) continue;
    if (f0 == 0.0) continue;  // handled by the neighbouring cell
    if ((f0 < 0.0) == (f1 < 0.0)) continue;
    // Subsample the cell: more than one rising crossing means two zeros share
    // a grid cell and the scan cannot resolve them.
    constexpr int kSub = 8;
    double prev_x = ws[i];
    double prev_f = f0;
    int rising = 0;
    std::pair<double, double> found{0.0, 0.0};
    for (int s = 1; s <= kSub; ++s) {
      const double x = ws[i] + (ws[i + 1] - ws[i]) * s / kSub;
      const double f = (s == kSub) ? f1 : im_y(spec, port, x, bridge);
      if (std::isfinite(prev_f) && std::isfinite(f) && prev_f < 0.0 && f >= 0.0) {
        ++rising;
        found = {prev_x, x};
      }
      prev_x = x;
      prev_f = f;
    }
    if (rising > 1) {
      throw Error(ErrorKind::unresolved_pair,
                  "unresolved pair: two admittance zeros share a grid cell near omega = " +
                      std::to_string(ws[i]));
    }
    if (rising == 1) brackets.push_back(found);
  }

  // Loss shifts the susceptance zeros of different ports apart by O(kappa),
  // so the per-port effective impedances are evaluated on the lossless
  // network, where every port shares the same zero. Q and kappa come from
  // the lossy network at the scanned port.
  CircuitSpec lossless = spec;
  lossless.cavity.r_a = 0.0;
  lossless.readout.r_b = 0.0;
  const bool has_loss = spec.cavity.r_a > 0.0 || spec.readout.r_b > 0.0;

  std::vector<NormalMode> modes;
  for (const auto& [lo, hi] : brackets) {
    const double w0 = bisect_im_zero(spec, port, lo, hi, im_y(spec, port, lo, bridge), bridge);
    const double slope = d_im_y(spec, port, w0, bridge);
    if (!(slope > 0.0)) continue;  // pole, not a resonance

    double w_ll = w0;
    if (has_loss) {
      const double blo = w0 * (1.0 - 1e-4);
      const double bhi = w0 * (1.0 + 1e-4);
      const double flo = im_y(lossless, port, blo, bridge);
      const double fhi = im_y(lossless, port, bhi, bridge);
      if ((flo < 0.0) != (fhi < 0.0)) {
        w_ll = bisect_im_zero(lossless, port, blo, bhi, flo, bridge);
      }
    }

    NormalMode m;
    m.omega = w_ll;
    auto zeff = [&](Port pp) {
      // A mode only has weight at a port whose susceptance actually vanishes
      // there; otherwise the formula would report the foreign background.
      const cplx y = port_admittance(lossless, pp, w_ll, bridge);
      const double d = d_im_y(lossless, pp, w_ll, bridge);
      if (!(d > 0.0)) return 0.0;
      if (std::abs(y.imag()) > 1e-8 * w_ll * d) return 0.0;
      return 2.0 / (w_ll * d);
    };
    m.z_eff_a = zeff(Port::a);
    m.z_eff_b = zeff(Port::b);
    m.z_eff_tl = zeff(Port::tl);
    const double re = port_admittance(spec, port, w0, bridge).real();
    if (re > 0.0) {
      m.q = 0.5 * w0 * slope / re;
      m.kappa = w0 / m.q;
    } else {
      m.q = std::numeric_limits<double>::infinity();
      m.kappa = 0.0;
    }
    modes.push_back(m);
  }
  return modes;
}

ModeCatalog build_catalog(const CircuitSpec& spec, double band_lo, double band_hi,
                          const BridgeSetting& bridge, int grid_per_fsr) {
  const double fsr0 = spec.fsr_nominal();
  const int pts = std::max(64, static_cast<int>((band_hi - band_lo) / fsr0 *
                                                grid_per_fsr));
  ModeCatalog cat;
  cat.band_lo = band_lo;
  cat.band_hi = band_hi;
  cat.bridge_eps_sq = 1.0 - bridge.arm / spec.readout.l0;

  // Line modes couple to port a (and the cavity mode to port tl) only through
  // narrow zero-pole pairs that a coarse scan can step over, so the family is
  // collected from both sides and merged; the readout mode comes from port b.
  cat.modes = find_normal_modes(spec, Port::a, band_lo, band_hi, pts, bridge);
  auto merge_from = [&cat](const std::vector<NormalMode>& found) {
    for (const NormalMode& m : found) {
      bool dup = false;
      for (const NormalMode& f : cat.modes) {
        if (std::abs(f.omega - m.omega) < 1e-8 * m.omega) {
          dup = true;
          break;
        }
      }
      if (!dup) cat.modes.push_back(m);
    }
  };
  merge_from(find_normal_modes(spec, Port::tl, band_lo, band_hi, pts, bridge));
  merge_from(find_normal_modes(spec, Port::b, band_lo, band_hi, pts, bridge));
  std::sort(cat.modes.begin(), cat.modes.end(),
            [](const NormalMode& x, const NormalMode& y) { return x.omega < y.omega; });
  if (cat.modes.empty()) {
    throw Error(ErrorKind::no_mode_in_band, "no A mode in band");
  }

  // Cavity-like and readout-like modes by effective-impedance argmax.
  double best_a = -1.0, second_a = -1.0, best_b = -1.0;
  for (std::size_t i = 0; i < cat.modes.size(); ++i) {
    const double za = cat.modes[i].z_eff_a;
    if (za > best_a) {
      second_a = best_a;
      best_a = za;
      cat.a_index = static_cast<int>(i);
    } else if (za > second_a) {
      second_a = za;
    }
    if (cat.modes[i].z_eff_b > best_b) {
      best_b = cat.modes[i].z_eff_b;
      cat.b_index = static_cast<int>(i);
    }
  }
  if (!(best_a > 0.0)) {
    throw Error(ErrorKind::no_mode_in_band, "no A mode in band");
  }
  if (!(best_b > 0.0)) {
    throw Error(ErrorKind::no_mode_in_band, "no B mode in band");
  }
  if (second_a > 0.0 && best_a / second_a < 2.0) {
    throw Error(ErrorKind::avoided_crossing,
                "cavity at avoided crossing: A-mode labeling ambiguous");
  }
  cat.modes[static_cast<std::size_t>(cat.a_index)].label = NormalMode::Label::A;
  cat.modes[static_cast<std::size_t>(cat.b_index)].label = NormalMode::Label::B;

  const double wa = cat.a_mode().omega;
  double below = -1.0, above = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cat.modes.size(); ++i) {
    const int ii = static_cast<int>(i);
    if (ii == cat.a_index || ii == cat.b_index) continue;
    const double w = cat.modes[i].omega;
    if (w < wa && w > below) {
      below = w;
      cat.c_index = ii;
    }
    if (w > wa && w < above) {
      above = w;
      cat.d_index = ii;
    }
  }
  if (cat.c_index < 0 || cat.d_index < 0) {
    throw Error(ErrorKind::no_mode_in_band,
                "no bracketing transmission-line mode in band");
  }

  cat.p_a = cat.a_mode().z_eff_a / spec.cavity_char_impedance();
  cat.delta_ca = cat.modes[static_cast<std::size_t>(cat.c_index)].omega - wa;
  cat.delta_da = cat.modes[static_cast<std::size_t>(cat.d_index)].omega - wa;
  cat.fsr = cat.delta_da - cat.delta_ca;
  cat.kappa_m_readout = (spec.readout.r_b > 0.0)
                            ? 1.0 / (spec.readout.r_b * spec.readout.c_b)
                            : 0.0;
  return cat;
}

namespace {

struct KappaProbe {
  double kappa;
  double p_a;
};

KappaProbe measure_cavity_kappa(const CircuitSpec& spec, double band_lo, double band_hi) {
  const double fsr0 = spec.fsr_nominal();
  const int pts =
      std::max(64, static_cast<int>((band_hi - band_lo) / fsr0 * 64));
  const auto modes = find_normal_modes(spec, Port::a, band_lo, band_hi, pts,
                                       BridgeSetting::balanced(spec.readout.l0));
  const NormalMode* a = nullptr;
  for (const NormalMode& m : modes) {
    if (a == nullptr || m.z_eff_a > a->z_eff_a) a = &m;
  }
  if (a == nullptr) {
    throw Error(ErrorKind::no_mode_in_band, "no A mode in band");
  }
  return {a->kappa, a->z_eff_a / spec.cavity_char_impedance()};
}

}  // namespace

CalibrationReport calibrate(const CircuitSpec& spec, const CalibrationTargets& targets,
                            double band_lo, double band_hi) {
  if (!(targets.kappa_l_target > 0.0)) {
    throw Error(ErrorKind::target_unreachable,
                "target unreachable in bounds: passive circuit cannot reach zero loss");
  }
  CircuitSpec s = spec;
  if (!(s.cavity.r_a > 0.0)) s.cavity.r_a = 1e6;

  double r_prev = s.cavity.r_a;
  KappaProbe probe = measure_cavity_kappa(s, band_lo, band_hi);
  double k_prev = probe.kappa;
  const double target = targets.kappa_l_target;

  // kappa is close to inversely proportional to R_A; secant on the logs.
  double r_cur = r_prev * (k_prev / target);
  int it = 1;
  for (; it <= 20; ++it) {
    if (!(r_cur > 1e-3 && r_cur < 1e12)) {
      throw Error(ErrorKind::target_unreachable, "target unreachable in bounds");
    }
    s.cavity.r_a = r_cur;
    probe = measure_cavity_kappa(s, band_lo, band_hi);
    const double k_cur = probe.kappa;
    if (std::abs(k_cur - target) <= 1e-4 * target) {
      CalibrationReport rep;
      rep.spec = s;
      rep.achieved_kappa = k_cur;
      rep.achieved_p_a = probe.p_a;
      rep.iterations = it;
      return rep;
    }
    const double dlk = std::log(k_cur) - std::log(k_prev);
    double r_next;
    if (std::abs(dlk) < 1e-15) {
      r_next = r_cur * (k_cur / target);
    } else {
      const double slope = (std::log(r_cur) - std::log(r_prev)) / dlk;
      r_next = std::exp(std::log(r_cur) - slope * (std::log(k_cur) - std::log(target)));
    }
    r_prev = r_cur;
    k_prev = k_cur;
    r_cur = r_next;
  }
  throw Error(ErrorKind::target_unreachable,
              "target unreachable in bounds: calibration did not converge");
}

InteractionRates rates_from_catalog(const ModeCatalog& catalog, const CircuitSpec& spec,
                                    const DriveSpec& drive) {
  drive.validate();
  if (catalog.b_index < 0) {
    throw Error(ErrorKind::no_mode_in_band, "catalog has no readout mode");
  }
  const double zb = catalog.b_mode().z_eff_b;
  InteractionRates out;
  out.modulation_warning = drive.over_modulation();
  for (std::size_t i = 0; i < catalog.modes.size(); ++i) {
    if (static_cast<int>(i) == catalog.b_index) continue;
    const NormalMode& m = catalog.modes[i];
    const double s = std::sqrt(m.z_eff_tl * zb) / (4.0 * spec.readout.l0);
    const int row = static_cast<int>(out.rows.size());
    if (static_cast<int>(i) == catalog.a_index) out.a_row = row;
    if (static_cast<int>(i) == catalog.c_index) out.c_row = row;
    if (static_cast<int>(i) == catalog.d_index) out.d_row = row;
    out.rows.push_back({m.omega, drive.ell_delta * s, drive.ell_sigma * s, m.label});
  }
  return out;
}

InteractionRates interaction_rates(const ModeCatalog& catalog, const CircuitSpec& spec,
                                   const DriveSpec& drive) {
  drive.validate();
  const double eps_sq = drive.mean_sq_epsilon();
  if (std::abs(catalog.bridge_eps_sq - eps_sq) < 1e-12) {
    return rates_from_catalog(catalog, spec, drive);
  }
  const ModeCatalog renorm =
      build_catalog(spec, catalog.band_lo, catalog.band_hi,
                    BridgeSetting{spec.readout.l0 * (1.0 - eps_sq), 0.0});
  return rates_from_catalog(renorm, spec, drive);
}

}  // namespace ceasefire
