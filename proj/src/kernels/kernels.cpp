#include "ceasefire/kernels.hpp"

#include "ceasefire/types.hpp"

namespace ceasefire::kernels {

void alpha_cf_sq_scalar(const double*, double*, std::size_t, const TwoModeAlphaParams&);
void alpha_std_sq_scalar(const double*, double*, std::size_t, const StdAlphaParams&);
void alpha4_sq_scalar(const double*, double*, std::size_t, const FourModeAlphaParams&);
void ladder_fold_scalar(const double*, double*, double*, std::size_t, double, double, int);

#if defined(__x86_64__) || defined(_M_X64)
void alpha_cf_sq_avx2(const double*, double*, std::size_t, const TwoModeAlphaParams&);
void alpha_std_sq_avx2(const double*, double*, std::size_t, const StdAlphaParams&);
void alpha4_sq_avx2(const double*, double*, std::size_t, const FourModeAlphaParams&);
void ladder_fold_avx2(const double*, double*, double*, std::size_t, double, double, int);
#endif

namespace {

const Dispatch kScalar = {alpha_cf_sq_scalar, alpha_std_sq_scalar,
                          alpha4_sq_scalar, ladder_fold_scalar};

#if defined(__x86_64__) || defined(_M_X64)
const Dispatch kAvx2 = {alpha_cf_sq_avx2, alpha_std_sq_avx2, alpha4_sq_avx2,
                        ladder_fold_avx2};
#endif

bool detect_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend g_backend = detect_avx2() ? Backend::avx2 : Backend::scalar;

}  // namespace

bool backend_available(Backend b) {
  if (b == Backend::scalar) return true;
  return detect_avx2();
}

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
  if (!backend_available(b)) {
    throw Error(ErrorKind::invalid_params, "kernel backend not available on this CPU");
  }
  g_backend = b;
}

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

const Dispatch& table(Backend b) {
#if defined(__x86_64__) || defined(_M_X64)
  if (b == Backend::avx2) return kAvx2;
#endif
  (void)b;
  return kScalar;
}

const Dispatch& active() { return table(g_backend); }

}  // namespace ceasefire::kernels
