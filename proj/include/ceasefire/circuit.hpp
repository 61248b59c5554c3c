#pragma once

#include <span>
#include <string>
#include <vector>

#include "ceasefire/types.hpp"

namespace ceasefire {

// Lumped-element model: parallel-LC cavity, coupling capacitor, LC-ladder
// transmission line, and a bridge readout resonator reduced to its T-junction
// equivalent (two arms of the off-modulated inductance, stem of the mutual).

struct CavitySpec {
  double l_a;  // H
  double c_a;  // F
  double c_c;  // coupling capacitor, F
  double r_a;  // loss resistor across port a, Ohm; <= 0 means lossless
};

struct LadderSpec {
  int cells;
  double l_cell;  // H
  double c_cell;  // F
};

struct ReadoutSpec {
  double l0;   // bridge element inductance, H
  double c_b;  // F
  double r_b;  // measurement load across port b, Ohm; <= 0 means lossless
};

struct LineSpec {
  double length;      // m
  double wave_speed;  // m/s
};

struct CircuitSpec {
  CavitySpec cavity;
  LadderSpec ladder;
  ReadoutSpec readout;
  LineSpec line;

  void validate() const;

  // Ladder cells from line geometry: characteristic impedance z0 and total
  // delay length/wave_speed split over `cells` identical cells.
  static CircuitSpec from_geometry(const CavitySpec& cavity, const ReadoutSpec& readout,
                                   double z0, double length, double wave_speed,
                                   int cells);

  double cavity_char_impedance() const;  // sqrt(L_A / C_A)
  double fsr_nominal() const;            // pi * wave_speed / length, rad/s
};

struct DriveSpec {
  double ell_delta;  // difference-frequency fractional inductance modulation
  double ell_sigma;  // sum-frequency fractional inductance modulation
  double phi;        // drive phase difference

  void validate() const;
  bool over_modulation() const { return ell_delta + ell_sigma > 0.25; }
  double mean_sq_epsilon() const {
    return 0.5 * (ell_delta * ell_delta + ell_sigma * ell_sigma);
  }
};

// T-junction state used for admittance evaluation. `balanced` is the bare
// bridge; `renormalized` applies the time-averaged second-order stiffening of
// the shunt arms (L0 -> L0 (1 - <eps^2>)) with zero static mutual;
// `static_mutual` freezes the instantaneous bridge at modulation eps.
struct BridgeSetting {
  double arm;   // H
  double stem;  // H; 0 decouples the readout from the line

  static BridgeSetting balanced(double l0) { return {l0, 0.0}; }
  static BridgeSetting renormalized(double l0, const DriveSpec& d) {
    return {l0 * (1.0 - d.mean_sq_epsilon()), 0.0};
  }
  static BridgeSetting static_mutual(double l0, double eps) {
    return {l0 * (1.0 - eps), l0 * eps};
  }
};

enum class Port { a, b, tl };

// Admittance seen at a port with the other ports open; loss resistors are
// part of the network whenever their values are positive.
cplx port_admittance(const CircuitSpec& spec, Port port, double omega,
                     const BridgeSetting& bridge);
void port_admittance_batch(const CircuitSpec& spec, Port port,
                           std::span<const double> omegas, std::span<cplx> out,
                           const BridgeSetting& bridge);

struct NormalMode {
  double omega;     // rad/s
  double z_eff_a;   // Ohm
  double z_eff_b;
  double z_eff_tl;
  double q;         // quality factor; infinite when the network is lossless
  double kappa;     // omega / q
  enum class Label { A, B, TL } label = Label::TL;
};

// Zeros of Im Y at `port` inside the band, polished by bisection. Slope is
// checked so admittance poles are excluded. Effective impedances are filled
// for all three ports; Q and kappa use the scanned port.
std::vector<NormalMode> find_normal_modes(const CircuitSpec& spec, Port port,
                                          double band_lo, double band_hi,
                                          int grid_pts, const BridgeSetting& bridge);

struct ModeCatalog {
  std::vector<NormalMode> modes;  // line-side family plus the readout mode
  int a_index = -1;
  int b_index = -1;
  int c_index = -1;
  int d_index = -1;
  double p_a = 0.0;
  double fsr = 0.0;       // omega_D - omega_C, rad/s
  double delta_ca = 0.0;  // omega_C - omega_A
  double delta_da = 0.0;  // omega_D - omega_A
  double kappa_m_readout = 0.0;  // 1/(R_B C_B) convention
  double band_lo = 0.0, band_hi = 0.0;
  double bridge_eps_sq = 0.0;  // <eps^2> of the bridge state used

  const NormalMode& a_mode() const { return modes[static_cast<std::size_t>(a_index)]; }
  const NormalMode& b_mode() const { return modes[static_cast<std::size_t>(b_index)]; }
};

ModeCatalog build_catalog(const CircuitSpec& spec, double band_lo, double band_hi,
                          const BridgeSetting& bridge, int grid_per_fsr = 64);

struct CalibrationTargets {
  double kappa_l_target;  // rad/s, for the bare (balanced-bridge) cavity mode
  double p_a_min = 0.0;
};

struct CalibrationReport {
  CircuitSpec spec;
  double achieved_kappa;
  double achieved_p_a;
  int iterations;
};

// Secant adjustment of R_A so the balanced-bridge cavity loss rate meets the
// target. Geometry is left untouched.
CalibrationReport calibrate(const CircuitSpec& spec, const CalibrationTargets& targets,
                            double band_lo, double band_hi);

struct InteractionRates {
  struct Row {
    double omega;  // mode frequency, rad/s
    double g;      // rad/s
    double h;      // rad/s
    NormalMode::Label label;
  };
  std::vector<Row> rows;  // one per line-family mode (everything except B)
  bool modulation_warning = false;
  int a_row = -1, c_row = -1, d_row = -1;
};

// First-order parametric rates g_iB, h_iB from the effective impedances of a
// catalog built with the drive's static renormalization. If the supplied
// catalog was built with a different bridge state it is rebuilt internally.
InteractionRates interaction_rates(const ModeCatalog& catalog, const CircuitSpec& spec,
                                   const DriveSpec& drive);

// Same computation without the renormalization handshake; the caller owns the
// bridge state of `catalog`.
InteractionRates rates_from_catalog(const ModeCatalog& catalog, const CircuitSpec& spec,
                                    const DriveSpec& drive);

}  // namespace ceasefire
