#pragma once

#include <array>
#include <cmath>

#include "ceasefire/kernels.hpp"
#include "ceasefire/types.hpp"

namespace ceasefire::detail {

// Closed-form pieces of the four-mode measurement-port scattering row, shared
// by the scalar kernel and the public zeta4 operation. Port/vector ordering:
//   u = [xi_a, xi_l, xi_C, xi_D, xi_m | xi_m+, xi_D+, xi_C+, xi_l+, xi_a+]
// with annihilation entries at (omega + omega_Delta) resp. omega, creation
// entries at the mirrored frequencies. J10 = diag(+1 x5, -1 x5).

struct FourModeCore {
  cplx beta;        // beta(w)
  cplx gamma;       // gamma(w)
  cplx d_cav;       // i*w + kappa_l/2
  cplx d_j[2];      // i*(w + Delta_jA) + kappa_j/2
  cplx d_jbar[2];   // i*(w - Delta_jA) + kappa_j/2
};

inline FourModeCore four_mode_core(double w, const kernels::FourModeAlphaParams& p) {
  FourModeCore c;
  c.d_cav = cplx(0.5 * p.kl, w);
  const cplx d_b(0.5 * p.km, w);
  cplx jsum(0.0, 0.0);
  cplx gsum(0.0, 0.0);
  for (int j = 0; j < 2; ++j) {
    c.d_j[j] = cplx(0.5 * p.kj[j], w + p.dja[j]);
    c.d_jbar[j] = cplx(0.5 * p.kj[j], w - p.dja[j]);
    jsum += p.gj[j] * p.gj[j] / c.d_j[j] - p.hj[j] * p.hj[j] / c.d_jbar[j];
    gsum += (2.0 * p.gj[j] * p.hj[j] * p.dja[j]) / (c.d_j[j] * c.d_jbar[j]);
  }
  const cplx eiphi = std::polar(1.0, p.phi);
  c.beta = d_b * c.d_cav + (p.gab * p.gab - p.hab * p.hab) + c.d_cav * jsum;
  c.gamma = -kI * eiphi * c.d_cav * gsum;
  return c;
}

// Measurement-port output row at detuning w (annihilation-side output). Needs
// the core at +w and the conjugated core values at -w.
inline std::array<cplx, 10> four_mode_row(const kernels::FourModeAlphaParams& p,
                                          const FourModeCore& cw, cplx beta_conj_neg,
                                          cplx gamma_conj_neg) {
  const cplx eta = cw.beta * beta_conj_neg - cw.gamma * gamma_conj_neg;
  const cplx u = kI / eta;
  const cplx eiphi = std::polar(1.0, p.phi);
  const cplx emiphi = std::conj(eiphi);
  const double skm = std::sqrt(p.km);
  const cplx num_g = p.gab * beta_conj_neg + p.hab * emiphi * cw.gamma;
  const cplx num_h = p.hab * eiphi * beta_conj_neg + p.gab * cw.gamma;

  std::array<cplx, 10> z;
  z[0] = u * num_g * (skm * std::sqrt(p.ka));
  z[1] = u * num_g * (skm * std::sqrt(p.kl));
  for (int j = 0; j < 2; ++j) {
    const cplx numj_g = p.gj[j] * beta_conj_neg + p.hj[j] * emiphi * cw.gamma;
    const cplx numj_h = p.hj[j] * eiphi * beta_conj_neg + p.gj[j] * cw.gamma;
    const double sk = skm * std::sqrt(p.kj[j]);
    z[2 + j] = u * numj_g * sk * (cw.d_cav / cw.d_j[j]);
    z[7 - j] = u * numj_h * sk * (cw.d_cav / cw.d_jbar[j]);
  }
  z[4] = 1.0 - beta_conj_neg * p.km * cw.d_cav / eta;
  z[5] = cw.gamma * p.km * cw.d_cav / eta;
  z[8] = u * num_h * (skm * std::sqrt(p.kl));
  z[9] = u * num_h * (skm * std::sqrt(p.ka));
  return z;
}

}  // namespace ceasefire::detail
