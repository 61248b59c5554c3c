#include <array>
#include <cmath>
#include <complex>

#include "ceasefire/detail/four_mode_math.hpp"
#include "ceasefire/kernels.hpp"

namespace ceasefire::kernels {

void alpha_cf_sq_scalar(const double* omega, double* out, std::size_t n,
                        const TwoModeAlphaParams& kp) {
  for (std::size_t i = 0; i < n; ++i) {
    const double w2 = omega[i] * omega[i];
    const double d = kp.p - w2;
    const double beta2 = d * d + kp.r2 * w2;
    const double a = kp.a1 / (kp.w_beta * beta2 + kp.a2);
    out[i] = a * a;
  }
}

void alpha_std_sq_scalar(const double* omega, double* out, std::size_t n,
                         const StdAlphaParams& kp) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = kp.b / (kp.s2 + omega[i] * omega[i]);
    out[i] = a * a;
  }
}

void ladder_fold_scalar(const double* omega, double* y_re, double* y_im,
                        std::size_t n, double l_cell, double c_cell, int cells) {
  for (std::size_t i = 0; i < n; ++i) {
    const double wc = omega[i] * c_cell;
    const double wl = omega[i] * l_cell;
    double yr = y_re[i];
    double yi = y_im[i];
    for (int k = 0; k < cells; ++k) {
      yi += wc;
      double den = yr * yr + yi * yi;
      double zr = yr / den;
      double zi = -yi / den + wl;
      den = zr * zr + zi * zi;
      yr = zr / den;
      yi = -zi / den;
    }
    y_re[i] = yr;
    y_im[i] = yi;
  }
}

namespace {

inline double alpha4_one(double w, const FourModeAlphaParams& p) {
  using detail::four_mode_core;
  using detail::four_mode_row;
  const auto cp = four_mode_core(w, p);
  const auto cm = four_mode_core(-w, p);
  const cplx bc_p = std::conj(cm.beta);   // conj(beta(-w))
  const cplx gc_p = std::conj(cm.gamma);  // conj(gamma(-w))
  const auto z2 = four_mode_row(p, cp, bc_p, gc_p);
  // Row of the conjugated output field: mirror-conjugate of the row at -w.
  const auto z2m = four_mode_row(p, cm, std::conj(cp.beta), std::conj(cp.gamma));
  std::array<cplx, 10> z3;
  for (int k = 0; k < 10; ++k) z3[k] = std::conj(z2m[9 - k]);

  const double occ_noise[10] = {0.0,       p.n_t,       p.n_t,       p.n_t,
                                p.n_t,     p.n_t + 1.0, p.n_t + 1.0, p.n_t + 1.0,
                                p.n_t + 1.0, 1.0};
  double s22 = 0.0, s33 = 0.0;
  cplx s32(0.0, 0.0);
  for (int k = 0; k < 10; ++k) {
    s22 += occ_noise[k] * std::norm(z2[k]);
    s33 += occ_noise[k] * std::norm(z3[k]);
    s32 += occ_noise[k] * std::conj(z3[k]) * z2[k];
  }
  const double a22 = std::norm(z2[0]) + std::norm(z2[9]);
  const double a33 = std::norm(z3[0]) + std::norm(z3[9]);
  const cplx a32 = std::conj(z3[0]) * z2[0] + std::conj(z3[9]) * z2[9];

  // PSD in quadrature theta: (s22+s33)/2 - Re[e^{-2 i theta} s32]
  const double sn = 0.5 * (s22 + s33) - (p.cos2t * s32.real() + p.sin2t * s32.imag());
  const double sa = p.n_a * (0.5 * (a22 + a33) -
                             (p.cos2t * a32.real() + p.sin2t * a32.imag()));
  const double alpha = sa / (sn + 0.5);
  return alpha * alpha;
}

}  // namespace

void alpha4_sq_scalar(const double* omega, double* out, std::size_t n,
                      const FourModeAlphaParams& kp) {
  for (std::size_t i = 0; i < n; ++i) out[i] = alpha4_one(omega[i], kp);
}

}  // namespace ceasefire::kernels
