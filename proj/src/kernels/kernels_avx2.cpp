// AVX2 variants of the batch kernels. Compiled with -mavx2 -mfma; callers go
// through the dispatch table, which only selects these when the CPU reports
// AVX2+FMA support.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "ceasefire/kernels.hpp"

namespace ceasefire::kernels {

namespace {

struct CVec {
  __m256d re, im;
};

inline CVec cset1(double re, double im) {
  return {_mm256_set1_pd(re), _mm256_set1_pd(im)};
}
inline CVec cadd(CVec a, CVec b) {
  return {_mm256_add_pd(a.re, b.re), _mm256_add_pd(a.im, b.im)};
}
inline CVec csub(CVec a, CVec b) {
  return {_mm256_sub_pd(a.re, b.re), _mm256_sub_pd(a.im, b.im)};
}
inline CVec cmul(CVec a, CVec b) {
  return {_mm256_fmsub_pd(a.re, b.re, _mm256_mul_pd(a.im, b.im)),
          _mm256_fmadd_pd(a.re, b.im, _mm256_mul_pd(a.im, b.re))};
}
inline CVec cscale(double s, CVec a) {
  const __m256d v = _mm256_set1_pd(s);
  return {_mm256_mul_pd(v, a.re), _mm256_mul_pd(v, a.im)};
}
inline __m256d cnorm(CVec a) {
  return _mm256_fmadd_pd(a.re, a.re, _mm256_mul_pd(a.im, a.im));
}
inline CVec cdiv(CVec a, CVec b) {
  const __m256d inv = _mm256_div_pd(_mm256_set1_pd(1.0), cnorm(b));
  const __m256d re = _mm256_fmadd_pd(a.re, b.re, _mm256_mul_pd(a.im, b.im));
  const __m256d im = _mm256_fmsub_pd(a.im, b.re, _mm256_mul_pd(a.re, b.im));
  return {_mm256_mul_pd(re, inv), _mm256_mul_pd(im, inv)};
}
inline CVec crecip(CVec b) {
  const __m256d inv = _mm256_div_pd(_mm256_set1_pd(1.0), cnorm(b));
  return {_mm256_mul_pd(b.re, inv),
          _mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), b.im), inv)};
}
inline CVec cconj(CVec a) {
  return {a.re, _mm256_sub_pd(_mm256_setzero_pd(), a.im)};
}
// conj(b) * a accumulated into separate components
inline CVec cconj_mul(CVec b, CVec a) {
  return {_mm256_fmadd_pd(b.re, a.re, _mm256_mul_pd(b.im, a.im)),
          _mm256_fmsub_pd(b.re, a.im, _mm256_mul_pd(b.im, a.re))};
}

}  // namespace

void alpha_cf_sq_avx2(const double* omega, double* out, std::size_t n,
                      const TwoModeAlphaParams& kp) {
  const __m256d p = _mm256_set1_pd(kp.p);
  const __m256d r2 = _mm256_set1_pd(kp.r2);
  const __m256d a1 = _mm256_set1_pd(kp.a1);
  const __m256d wb = _mm256_set1_pd(kp.w_beta);
  const __m256d a2 = _mm256_set1_pd(kp.a2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w = _mm256_loadu_pd(omega + i);
    const __m256d w2 = _mm256_mul_pd(w, w);
    const __m256d d = _mm256_sub_pd(p, w2);
    const __m256d beta2 = _mm256_fmadd_pd(d, d, _mm256_mul_pd(r2, w2));
    const __m256d den = _mm256_fmadd_pd(wb, beta2, a2);
    const __m256d a = _mm256_div_pd(a1, den);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(a, a));
  }
  for (; i < n; ++i) {
    const double w2 = omega[i] * omega[i];
    const double d = kp.p - w2;
    const double a = kp.a1 / (kp.w_beta * (d * d + kp.r2 * w2) + kp.a2);
    out[i] = a * a;
  }
}

void alpha_std_sq_avx2(const double* omega, double* out, std::size_t n,
                       const StdAlphaParams& kp) {
  const __m256d b = _mm256_set1_pd(kp.b);
  const __m256d s2 = _mm256_set1_pd(kp.s2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w = _mm256_loadu_pd(omega + i);
    const __m256d a = _mm256_div_pd(b, _mm256_fmadd_pd(w, w, s2));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(a, a));
  }
  for (; i < n; ++i) {
    const double a = kp.b / (kp.s2 + omega[i] * omega[i]);
    out[i] = a * a;
  }
}

void ladder_fold_avx2(const double* omega, double* y_re, double* y_im,
                      std::size_t n, double l_cell, double c_cell, int cells) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vc = _mm256_set1_pd(c_cell);
  const __m256d vl = _mm256_set1_pd(l_cell);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w = _mm256_loadu_pd(omega + i);
    const __m256d wc = _mm256_mul_pd(w, vc);
    const __m256d wl = _mm256_mul_pd(w, vl);
    __m256d yr = _mm256_loadu_pd(y_re + i);
    __m256d yi = _mm256_loadu_pd(y_im + i);
    for (int k = 0; k < cells; ++k) {
      yi = _mm256_add_pd(yi, wc);
      __m256d inv = _mm256_div_pd(one, _mm256_fmadd_pd(yr, yr, _mm256_mul_pd(yi, yi)));
      const __m256d zr = _mm256_mul_pd(yr, inv);
      const __m256d zi = _mm256_fnmadd_pd(yi, inv, wl);
      inv = _mm256_div_pd(one, _mm256_fmadd_pd(zr, zr, _mm256_mul_pd(zi, zi)));
      yr = _mm256_mul_pd(zr, inv);
      yi = _mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), zi), inv);
    }
    _mm256_storeu_pd(y_re + i, yr);
    _mm256_storeu_pd(y_im + i, yi);
  }
  for (; i < n; ++i) {
    const double wc = omega[i] * c_cell;
    const double wl = omega[i] * l_cell;
    double yr = y_re[i], yi = y_im[i];
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

struct Core4 {
  CVec beta, gamma, d_cav;
  CVec d_j[2], d_jbar[2];
};

inline Core4 core4(__m256d w, const FourModeAlphaParams& p, double cphi, double sphi) {
  Core4 c;
  c.d_cav = {_mm256_set1_pd(0.5 * p.kl), w};
  const CVec d_b{_mm256_set1_pd(0.5 * p.km), w};
  CVec jsum = cset1(0.0, 0.0);
  CVec gsum = cset1(0.0, 0.0);
  for (int j = 0; j < 2; ++j) {
    c.d_j[j] = {_mm256_set1_pd(0.5 * p.kj[j]),
                _mm256_add_pd(w, _mm256_set1_pd(p.dja[j]))};
    c.d_jbar[j] = {_mm256_set1_pd(0.5 * p.kj[j]),
                   _mm256_sub_pd(w, _mm256_set1_pd(p.dja[j]))};
    jsum = cadd(jsum, csub(cscale(p.gj[j] * p.gj[j], crecip(c.d_j[j])),
                           cscale(p.hj[j] * p.hj[j], crecip(c.d_jbar[j]))));
    gsum = cadd(gsum, cscale(2.0 * p.gj[j] * p.hj[j] * p.dja[j],
                             crecip(cmul(c.d_j[j], c.d_jbar[j]))));
  }
  const CVec eiphi = cset1(cphi, sphi);
  c.beta = cadd(cadd(cmul(d_b, c.d_cav),
                     cset1(p.gab * p.gab - p.hab * p.hab, 0.0)),
                cmul(c.d_cav, jsum));
  // gamma = -i * e^{i phi} * d_cav * gsum
  const CVec t = cmul(cmul(eiphi, c.d_cav), gsum);
  c.gamma = {t.im, _mm256_sub_pd(_mm256_setzero_pd(), t.re)};
  return c;
}

inline void row4(const FourModeAlphaParams& p, const Core4& cw, CVec bc, CVec gc,
                 double cphi, double sphi, CVec z[10]) {
  const CVec eta = csub(cmul(cw.beta, bc), cmul(cw.gamma, gc));
  const CVec inv_eta = crecip(eta);
  // u = i / eta
  const CVec u = {_mm256_sub_pd(_mm256_setzero_pd(), inv_eta.im), inv_eta.re};
  const CVec eiphi = cset1(cphi, sphi);
  const CVec emiphi = cset1(cphi, -sphi);
  const double skm = std::sqrt(p.km);
  const CVec num_g = cadd(cscale(p.gab, bc), cscale(p.hab, cmul(emiphi, cw.gamma)));
  const CVec num_h = cadd(cscale(p.hab, cmul(eiphi, bc)), cscale(p.gab, cw.gamma));

  z[0] = cscale(skm * std::sqrt(p.ka), cmul(u, num_g));
  z[1] = cscale(skm * std::sqrt(p.kl), cmul(u, num_g));
  for (int j = 0; j < 2; ++j) {
    const CVec numj_g = cadd(cscale(p.gj[j], bc), cscale(p.hj[j], cmul(emiphi, cw.gamma)));
    const CVec numj_h = cadd(cscale(p.hj[j], cmul(eiphi, bc)), cscale(p.gj[j], cw.gamma));
    const double sk = skm * std::sqrt(p.kj[j]);
    z[2 + j] = cscale(sk, cmul(cmul(u, numj_g), cdiv(cw.d_cav, cw.d_j[j])));
    z[7 - j] = cscale(sk, cmul(cmul(u, numj_h), cdiv(cw.d_cav, cw.d_jbar[j])));
  }
  const CVec km_dcav = cscale(p.km, cw.d_cav);
  z[4] = csub(cset1(1.0, 0.0), cmul(cmul(bc, km_dcav), inv_eta));
  z[5] = cmul(cmul(cw.gamma, km_dcav), inv_eta);
  z[8] = cscale(skm * std::sqrt(p.kl), cmul(u, num_h));
  z[9] = cscale(skm * std::sqrt(p.ka), cmul(u, num_h));
}

}  // namespace

void alpha4_sq_avx2(const double* omega, double* out, std::size_t n,
                    const FourModeAlphaParams& kp) {
  const double cphi = std::cos(kp.phi);
  const double sphi = std::sin(kp.phi);
  const double occ_noise[10] = {0.0,          kp.n_t,       kp.n_t,       kp.n_t,
                                kp.n_t,       kp.n_t + 1.0, kp.n_t + 1.0, kp.n_t + 1.0,
                                kp.n_t + 1.0, 1.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w = _mm256_loadu_pd(omega + i);
    const __m256d wneg = _mm256_sub_pd(_mm256_setzero_pd(), w);
    const Core4 cp = core4(w, kp, cphi, sphi);
    const Core4 cm = core4(wneg, kp, cphi, sphi);
    CVec z2[10], z2m[10], z3[10];
    row4(kp, cp, cconj(cm.beta), cconj(cm.gamma), cphi, sphi, z2);
    row4(kp, cm, cconj(cp.beta), cconj(cp.gamma), cphi, sphi, z2m);
    for (int k = 0; k < 10; ++k) z3[k] = cconj(z2m[9 - k]);

    __m256d s22 = _mm256_setzero_pd();
    __m256d s33 = _mm256_setzero_pd();
    CVec s32 = cset1(0.0, 0.0);
    for (int k = 0; k < 10; ++k) {
      const __m256d occ = _mm256_set1_pd(occ_noise[k]);
      s22 = _mm256_fmadd_pd(occ, cnorm(z2[k]), s22);
      s33 = _mm256_fmadd_pd(occ, cnorm(z3[k]), s33);
      const CVec c = cconj_mul(z3[k], z2[k]);
      s32.re = _mm256_fmadd_pd(occ, c.re, s32.re);
      s32.im = _mm256_fmadd_pd(occ, c.im, s32.im);
    }
    const __m256d a22 = _mm256_add_pd(cnorm(z2[0]), cnorm(z2[9]));
    const __m256d a33 = _mm256_add_pd(cnorm(z3[0]), cnorm(z3[9]));
    const CVec a32 = cadd(cconj_mul(z3[0], z2[0]), cconj_mul(z3[9], z2[9]));

    const __m256d c2t = _mm256_set1_pd(kp.cos2t);
    const __m256d s2t = _mm256_set1_pd(kp.sin2t);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d sn = _mm256_sub_pd(
        _mm256_mul_pd(half, _mm256_add_pd(s22, s33)),
        _mm256_fmadd_pd(c2t, s32.re, _mm256_mul_pd(s2t, s32.im)));
    const __m256d sa = _mm256_mul_pd(
        _mm256_set1_pd(kp.n_a),
        _mm256_sub_pd(_mm256_mul_pd(half, _mm256_add_pd(a22, a33)),
                      _mm256_fmadd_pd(c2t, a32.re, _mm256_mul_pd(s2t, a32.im))));
    const __m256d alpha = _mm256_div_pd(sa, _mm256_add_pd(sn, half));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(alpha, alpha));
  }
  if (i < n) {
    // Remainder lanes go through the scalar reference.
    extern void alpha4_sq_scalar(const double*, double*, std::size_t,
                                 const FourModeAlphaParams&);
    alpha4_sq_scalar(omega + i, out + i, n - i, kp);
  }
}

}  // namespace ceasefire::kernels

#endif  // x86_64
