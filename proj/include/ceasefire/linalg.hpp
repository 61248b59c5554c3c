#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "ceasefire/types.hpp"

namespace ceasefire::linalg {

// Dense complex linear solve A x = b with partial pivoting, for the small
// fixed-size systems assembled from equations of motion (4x4 and 8x8).
// A is row-major n*n, b has n entries; both are overwritten.
template <std::size_t N>
void solve_inplace(std::array<cplx, N * N>& a, std::array<cplx, N>& b) {
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    double best = std::abs(a[col * N + col]);
    for (std::size_t r = col + 1; r < N; ++r) {
      double m = std::abs(a[r * N + col]);
      if (m > best) {
        best = m;
        piv = r;
      }
    }
    if (!(best > 1e-300)) {
      throw Error(ErrorKind::singular_system,
                  "singular linear system (parametric divergence?)");
    }
    if (piv != col) {
      for (std::size_t c = col; c < N; ++c) std::swap(a[col * N + c], a[piv * N + c]);
      std::swap(b[col], b[piv]);
    }
    const cplx inv = 1.0 / a[col * N + col];
    for (std::size_t r = col + 1; r < N; ++r) {
      const cplx f = a[r * N + col] * inv;
      if (f == cplx{0.0, 0.0}) continue;
      for (std::size_t c = col; c < N; ++c) a[r * N + c] -= f * a[col * N + c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t ri = N; ri-- > 0;) {
    cplx acc = b[ri];
    for (std::size_t c = ri + 1; c < N; ++c) acc -= a[ri * N + c] * b[c];
    b[ri] = acc / a[ri * N + ri];
  }
}

}  // namespace ceasefire::linalg
