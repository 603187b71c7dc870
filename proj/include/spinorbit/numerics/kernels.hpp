#pragma once

// Cauchy-product kernel shared by all Taylor recurrences. The MPFR
// overload works on the raw limbs to avoid per-term temporaries.

#include "spinorbit/numerics/precision.hpp"

namespace spinorbit::numerics {

/// out += sum_{j=lo}^{k} a[j] * b[k-j]
template <class T>
inline void conv_add(T& out, const T* a, const T* b, int lo, int k) {
  for (int j = lo; j <= k; ++j) out += a[j] * b[k - j];
}

inline void conv_add(Mp& out, const Mp* a, const Mp* b, int lo, int k) {
  thread_local Mp tmp;
  mpfr_ptr r = out.backend().data();
  mpfr_ptr t = tmp.backend().data();
  if (mpfr_get_prec(t) != mpfr_get_prec(r)) mpfr_set_prec(t, mpfr_get_prec(r));
  for (int j = lo; j <= k; ++j) {
    mpfr_mul(t, a[j].backend().data(), b[k - j].backend().data(), MPFR_RNDN);
    mpfr_add(r, r, t, MPFR_RNDN);
  }
}

}  // namespace spinorbit::numerics
