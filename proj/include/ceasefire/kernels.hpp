#pragma once

#include <cstddef>
#include <string>

namespace ceasefire::kernels {

// Batch kernels for the arithmetic inner loops: visibility-squared integrands
// evaluated at quadrature nodes and LC-ladder admittance folding over
// frequency grids. Each kernel has a scalar reference implementation and an
// AVX2 variant; the active variant is selected at runtime from CPU features
// and can be overridden (tests run both and compare).

enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_available(Backend b);
void set_backend(Backend b);  // throws ceasefire::Error if unavailable
const char* backend_name(Backend b);

// Two-mode amplified-quadrature visibility:
//   |beta(w)|^2 = (p - w^2)^2 + r2 * w^2
//   alpha(w)    = a1 / (w_beta * |beta(w)|^2 + a2)
// out[i] = alpha(omega[i])^2
struct TwoModeAlphaParams {
  double p;       // g^2 - h^2 + kappa_m*kappa_l/4
  double r2;      // ((kappa_m + kappa_l)/2)^2
  double a1;      // n_a*kappa_a*kappa_m*(g+h)^2
  double w_beta;  // n_T + 1
  double a2;      // (n_T + 1/2) * 2*kappa_l*kappa_m*h*(g+h)
};

// Standard-haloscope visibility: alpha(w) = b / (s2 + w^2); out = alpha^2.
struct StdAlphaParams {
  double b;   // n_a*kappa_a*kappa_c / (n_T + 1/2)
  double s2;  // ((kappa_c + kappa_l)/2)^2
};

// Four-mode amplified-quadrature visibility-squared. All rates in units of
// kappa_l. theta is the amplified-quadrature angle (precomputed).
struct FourModeAlphaParams {
  double kl, km, ka;
  double gab, hab;
  double gj[2], hj[2];  // C, D couplings to the readout mode
  double dja[2];        // mode detunings from the cavity: omega_C/D - omega_A
  double kj[2];         // C, D loss rates
  double phi;
  double n_t, n_a;
  double cos2t, sin2t;  // cos/sin of 2*theta
};

// In-place ladder fold: `cells` repetitions of
//   Y += i*w*C ; Y = 1 / (1/Y + i*w*L)
// applied lane-wise to the admittance (y_re, y_im) at frequency omega[i].
using LadderFoldFn = void (*)(const double* omega, double* y_re, double* y_im,
                              std::size_t n, double l_cell, double c_cell,
                              int cells);
using AlphaCfSqFn = void (*)(const double* omega, double* out, std::size_t n,
                             const TwoModeAlphaParams& kp);
using AlphaStdSqFn = void (*)(const double* omega, double* out, std::size_t n,
                              const StdAlphaParams& kp);
using Alpha4SqFn = void (*)(const double* omega, double* out, std::size_t n,
                            const FourModeAlphaParams& kp);

struct Dispatch {
  AlphaCfSqFn alpha_cf_sq;
  AlphaStdSqFn alpha_std_sq;
  Alpha4SqFn alpha4_sq;
  LadderFoldFn ladder_fold;
};

const Dispatch& active();
const Dispatch& table(Backend b);

inline void alpha_cf_sq(const double* omega, double* out, std::size_t n,
                        const TwoModeAlphaParams& kp) {
  active().alpha_cf_sq(omega, out, n, kp);
}
inline void alpha_std_sq(const double* omega, double* out, std::size_t n,
                         const StdAlphaParams& kp) {
  active().alpha_std_sq(omega, out, n, kp);
}
inline void alpha4_sq(const double* omega, double* out, std::size_t n,
                      const FourModeAlphaParams& kp) {
  active().alpha4_sq(omega, out, n, kp);
}
inline void ladder_fold(const double* omega, double* y_re, double* y_im,
                        std::size_t n, double l_cell, double c_cell, int cells) {
  active().ladder_fold(omega, y_re, y_im, n, l_cell, c_cell, cells);
}

}  // namespace ceasefire::kernels
