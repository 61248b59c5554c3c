#pragma once

#include <array>
#include <span>
#include <vector>

#include "ceasefire/kernels.hpp"
#include "ceasefire/types.hpp"

namespace ceasefire {

// Parameters of the two-mode swap/squeeze readout model. kappa_l sets the
// frequency unit; all other rates are multiples of it. Frequencies passed to
// the operations below are detunings in the readout rotating frame.
struct TwoModeParams {
  double kappa_l;
  double kappa_m;
  double kappa_a;
  double g;
  double h;
  double phi;
  double n_t;
  double n_a;

  TwoModeParams(double kappa_l_, double kappa_m_, double g_, double h_,
                double kappa_a_ = -1.0, double n_a_ = 1.0, double n_t_ = 0.0,
                double phi_ = 0.0);

  double cooperativity() const {  // C = 4 g^2 / (kappa_m kappa_l)
    return 4.0 * g * g / (kappa_m * kappa_l);
  }
};

struct QuadratureAngle {
  double theta;
  explicit QuadratureAngle(double t) : theta(wrap_angle(t)) {}
};

// 6x6 scattering map between port input and output fields at detuning omega.
// Vector ordering: [xi_a, xi_l, xi_m | xi_m+, xi_l+, xi_a+], annihilation
// entries at (omega + omega_Delta) resp. omega, creation entries mirrored.
struct SusceptibilityMatrix {
  double omega;
  std::array<cplx, 36> entries;

  cplx& at(int i, int j) { return entries[static_cast<std::size_t>(6 * i + j)]; }
  const cplx& at(int i, int j) const {
    return entries[static_cast<std::size_t>(6 * i + j)];
  }
};

struct VisibilityMode {
  enum class Kind { ceasefire, standard };
  Kind kind;
  double kappa_c;  // standard-haloscope coupling; unused for ceasefire

  static VisibilityMode ceasefire() { return {Kind::ceasefire, 0.0}; }
  static VisibilityMode standard(double kappa_c) {
    return {Kind::standard, kappa_c};
  }
};

struct VisibilityCurve {
  std::vector<double> omegas;
  std::vector<double> alphas;
  TwoModeParams params_echo;
  VisibilityMode mode;
};

struct Susceptibilities {
  cplx chi_ma;
  cplx chi_ml;
  cplx chi_mm;
};

struct OutputPsd {
  double s_axion;
  double s_noise;
};

// beta(omega) = g^2 - h^2 + (i w + kappa_m/2)(i w + kappa_l/2)
cplx beta(double omega, const TwoModeParams& p);

// Throws parametric_divergence when |beta| is below threshold.
Susceptibilities susceptibilities(double omega, const TwoModeParams& p);

// Standard-haloscope signal susceptibility with measurement coupling kappa_c.
cplx chi_standard(double omega, double kappa_c, const TwoModeParams& p);

// Full 6x6 scattering matrix from the closed-form entries.
SusceptibilityMatrix zeta_matrix(double omega, const TwoModeParams& p);

// Independent verification path: assembles the frequency-domain equations of
// motion as a dense linear system, solves numerically, and applies the port
// input-output relations. Shares no algebra with zeta_matrix.
SusceptibilityMatrix zeta_oracle(double omega, const TwoModeParams& p);

// Measurement-port output spectral density split into the axion-signal and
// thermal/vacuum-noise contributions, in the quadrature rotated by theta.
OutputPsd output_psd(double omega, QuadratureAngle theta, const TwoModeParams& p);

// Visibility alpha(omega) sampled on a strictly increasing grid.
// ceasefire mode: amplified quadrature, with the half-quantum penalty of the
// follow-on phase-insensitive amplifier in the denominator.
VisibilityCurve visibility(std::span<const double> omega_grid,
                           const TwoModeParams& p, VisibilityMode mode);

double alpha_cf(double omega, const TwoModeParams& p);
double alpha_standard(double omega, double kappa_c, const TwoModeParams& p);

// Kernel-parameter packing for the batch visibility-squared kernels.
kernels::TwoModeAlphaParams cf_kernel_params(const TwoModeParams& p);
kernels::StdAlphaParams std_kernel_params(double kappa_c, const TwoModeParams& p);

// |beta| threshold below which the system is treated as at/past the
// parametric-oscillation pole.
double divergence_threshold(const TwoModeParams& p);

}  // namespace ceasefire
