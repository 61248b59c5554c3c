#pragma once

#include <array>
#include <span>
#include <vector>

#include "ceasefire/circuit.hpp"
#include "ceasefire/scan_rate.hpp"
#include "ceasefire/two_mode.hpp"

namespace ceasefire {

// Extended model including the two transmission-line modes bracketing the
// cavity mode. Rates are in units of kappa_l; detunings delta_ca/delta_da are
// omega_C - omega_A and omega_D - omega_A. The mode hierarchy of the
// equations of motion is omega_C < omega_A < omega_D < omega_B, so delta_bc =
// omega_Delta - delta_ca (the opposite hierarchy enters through sign flips of
// the deltas).
struct FourModeParams {
  double kappa_l = 1.0;
  double kappa_m = 0.0;
  double kappa_a = 1e-6;
  double kappa_c_mode = 1.0;
  double kappa_d_mode = 1.0;
  double g_ab = 0.0, h_ab = 0.0;
  double g_cb = 0.0, h_cb = 0.0;
  double g_db = 0.0, h_db = 0.0;
  double delta_ca = 0.0;
  double delta_da = 0.0;
  double phi = 0.0;
  double n_t = 0.0;
  double n_a = 1.0;
  double p_a = 1.0;

  void validate() const;
};

struct BetaGammaEta {
  cplx beta;           // beta(omega)
  cplx beta_conj_neg;  // conj(beta(-omega))
  cplx gamma;
  cplx gamma_conj_neg;
  cplx eta;            // beta*beta_conj_neg - gamma*gamma_conj_neg
};

BetaGammaEta beta_gamma_eta(double omega, const FourModeParams& p);

// Measurement-port susceptibility row. Creation-side entries are the
// coefficients of the mirrored input fields.
struct Zeta4Row {
  double omega;
  cplx zeta_ma, zeta_ml, zeta_mc, zeta_md, zeta_mm;
  cplx zeta_mm_dag, zeta_md_dag, zeta_mc_dag, zeta_ml_dag, zeta_ma_dag;

  std::array<cplx, 10> as_array() const {
    return {zeta_ma, zeta_ml, zeta_mc, zeta_md, zeta_mm,
            zeta_mm_dag, zeta_md_dag, zeta_mc_dag, zeta_ml_dag, zeta_ma_dag};
  }
};

// Closed-form evaluation.
Zeta4Row zeta4(double omega, const FourModeParams& p);

// Independent verification path: dense solve of the eight frequency-domain
// equations of motion plus port input-output relations.
Zeta4Row eom_oracle4(double omega, const FourModeParams& p);

// Full 10x10 scattering map (5 ports x 2 conjugates) from the dense solve,
// in the ordering [a, l, C, D, m | m+, D+, C+, l+, a+].
using Zeta10 = std::array<cplx, 100>;
Zeta10 zeta10_oracle(double omega, const FourModeParams& p);

struct OutputPsd4 {
  double s_axion;
  double s_noise;
};

// Measurement-port output spectral density in the quadrature rotated by
// theta, from the scattering rows and thermal/vacuum port inputs.
OutputPsd4 output_psd4(double omega, double theta, const FourModeParams& p);

// Quadrature angle that maximizes the on-resonance axion signal, reduced to
// [0, pi) (quadrature variances are pi-periodic). Reduces to phi/2 mod pi
// when the line-mode couplings vanish.
double amplified_quadrature_angle(const FourModeParams& p);

// At/past the self-oscillation boundary: the swap/squeeze sector crosses at
// Re beta(0) <= 0 and the line-mode sector at eta(0) <= 0.
bool four_mode_oscillating(const FourModeParams& p);

// E(4) = p_a^2 * int alpha4^2 / int alpha0^2 at kappa_c = 2 kappa_l.
EnhancementResult enhancement4(const FourModeParams& p, double rel_tol = 1e-9);

kernels::FourModeAlphaParams four_mode_kernel_params(const FourModeParams& p,
                                                     double theta);

struct DetuningSweep {
  std::vector<double> delta_a;  // cavity detuning from the C/D midpoint
  std::vector<double> e;
  std::vector<std::uint8_t> flagged;  // avoided-crossing neighborhoods, failures
  double peak_delta = 0.0;
  double peak_e = 0.0;

  // Mean of E over unflagged samples with |delta_a| <= halfwidth.
  double window_average(double halfwidth) const;
};

// Pure input-output sweep: updates delta_ca = -fsr/2 - d, delta_da =
// fsr/2 - d per grid point; the rates of the template are held fixed. Points
// within gap_halfwidth of a line mode are flagged as inoperable.
DetuningSweep detuning_sweep(const FourModeParams& p_template,
                             std::span<const double> delta_a_grid, double fsr,
                             double gap_halfwidth = -1.0, double rel_tol = 1e-8,
                             int threads = 0);

// Circuit-backed sweep: retunes the cavity per grid point, rebuilds the mode
// catalog and rates, and recomputes kappa_l, p_a and the detunings from the
// circuit at every point. Points where the catalog fails (avoided crossings)
// are flagged.
struct CircuitSweepConfig {
  DriveSpec drive{0.0, 0.0, 0.0};
  double band_lo = 0.0, band_hi = 0.0;
  double n_t = 0.0;
  double n_a = 1.0;
  double kappa_a_ratio = 1e-6;  // kappa_a / kappa_l
  double rel_tol = 1e-8;
  int threads = 0;
};

// Map a circuit catalog + rates onto the normalized four-mode parameters.
FourModeParams four_mode_from_circuit(const CircuitSpec& spec, const ModeCatalog& catalog,
                                      const InteractionRates& rates,
                                      const CircuitSweepConfig& cfg);

DetuningSweep detuning_sweep_circuit(const CircuitSpec& spec,
                                     std::span<const double> delta_a_grid,
                                     const CircuitSweepConfig& cfg);

struct LengthSweepRow {
  double length;
  double fsr;                     // rad/s
  std::vector<double> freq;      // absolute cavity frequency, rad/s
  std::vector<double> e;
  std::vector<std::uint8_t> flagged;
  double peak_freq = 0.0;
  double peak_e = 0.0;
};

struct LengthSweep {
  std::vector<LengthSweepRow> rows;

  // Upper envelope over the length family on the union frequency grid.
  void envelope(std::vector<double>& freq, std::vector<double>& e) const;
};

LengthSweep length_sweep(const CircuitSpec& spec, std::span<const double> lengths,
                         std::span<const double> delta_a_grid,
                         const CircuitSweepConfig& cfg);

}  // namespace ceasefire
