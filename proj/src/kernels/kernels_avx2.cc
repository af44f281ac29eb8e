// SPDX-License-Identifier: Apache-2.0
//
// Compiled with -mavx2 -mfma. Only reached through the dispatcher after a
// cpuid check. Arrays are interleaved (re, im) doubles; `n` counts complex
// elements except in AxpyReal.
#include <immintrin.h>

#include <cstddef>

#include "cgoinv/kernels.h"

namespace cgoinv::kernels::avx2 {
namespace {

// (a.re*b.re - a.im*b.im, a.re*b.im + a.im*b.re) for two complex lanes.
inline __m256d ComplexMul(__m256d a, __m256d b) {
  const __m256d a_re = _mm256_movedup_pd(a);        // ar ar
  const __m256d a_im = _mm256_permute_pd(a, 0xF);   // ai ai
  const __m256d b_swap = _mm256_permute_pd(b, 0x5); // bi br
  return _mm256_fmaddsub_pd(a_re, b, _mm256_mul_pd(a_im, b_swap));
}

inline double HorizontalSum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void Multiply(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(a + 2 * i);
    const __m256d vb = _mm256_loadu_pd(b + 2 * i);
    _mm256_storeu_pd(out + 2 * i, ComplexMul(va, vb));
  }
  for (; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    out[2 * i] = ar * br - ai * bi;
    out[2 * i + 1] = ar * bi + ai * br;
  }
}

void Axpy(double alpha_re, double alpha_im, const double* x, double* y,
          std::size_t n) {
  const __m256d s = _mm256_setr_pd(alpha_re, alpha_im, alpha_re, alpha_im);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(x + 2 * i);
    const __m256d vy = _mm256_loadu_pd(y + 2 * i);
    _mm256_storeu_pd(y + 2 * i, _mm256_add_pd(vy, ComplexMul(s, vx)));
  }
  for (; i < n; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    y[2 * i] += alpha_re * xr - alpha_im * xi;
    y[2 * i + 1] += alpha_re * xi + alpha_im * xr;
  }
}

void AxpyReal(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void DotConj(const double* a, const double* b, std::size_t n, double* re,
             double* im) {
  // re += ar*br + ai*bi ; im += ar*bi - ai*br
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(a + 2 * i);
    const __m256d vb = _mm256_loadu_pd(b + 2 * i);
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    const __m256d b_swap = _mm256_permute_pd(vb, 0x5);  // bi br
    acc_im = _mm256_fmadd_pd(va, b_swap, acc_im);       // ar*bi, ai*br
  }
  double sum_re = HorizontalSum(acc_re);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc_im);
  double sum_im = (lanes[0] - lanes[1]) + (lanes[2] - lanes[3]);
  for (; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    sum_re += ar * br + ai * bi;
    sum_im += ar * bi - ai * br;
  }
  *re = sum_re;
  *im = sum_im;
}

double NormSquared(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(a + 2 * i);
    acc = _mm256_fmadd_pd(va, va, acc);
  }
  double sum = HorizontalSum(acc);
  for (; i < n; ++i) sum += a[2 * i] * a[2 * i] + a[2 * i + 1] * a[2 * i + 1];
  return sum;
}

double DistanceSquared(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + 2 * i), _mm256_loadu_pd(b + 2 * i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double sum = HorizontalSum(acc);
  for (; i < n; ++i) {
    const double dr = a[2 * i] - b[2 * i];
    const double di = a[2 * i + 1] - b[2 * i + 1];
    sum += dr * dr + di * di;
  }
  return sum;
}

}  // namespace cgoinv::kernels::avx2
