// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel inner loops shared by the spectral solver, the projections
// and the lattice sums. Every kernel has a scalar reference implementation
// and, where the CPU supports it, an AVX2/FMA variant selected at runtime.
// Complex arrays are passed as std::complex<double>, which is layout
// compatible with interleaved (re, im) doubles.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace cgoinv::kernels {

enum class Backend { kScalar, kAvx2 };

std::string_view BackendName(Backend backend);

// True when the binary carries the AVX2 variants and the CPU reports
// avx2 and fma.
bool Avx2Available();

// Backend currently used by the dispatching entry points below. Defaults to
// the fastest available one; the CGOINV_KERNELS=scalar environment variable
// forces the reference path.
Backend ActiveBackend();

// Selects the backend; requesting kAvx2 on a machine without it throws
// InvalidArgument. Not synchronized with concurrent kernel calls.
void SetBackend(Backend backend);

using Complex = std::complex<double>;

// out[i] = a[i] * b[i]. `out` may alias `a` or `b`.
void Multiply(std::span<const Complex> a, std::span<const Complex> b,
              std::span<Complex> out);

// y[i] += alpha * x[i].
void Axpy(Complex alpha, std::span<const Complex> x, std::span<Complex> y);

// y[i] += alpha * x[i] for real arrays.
void AxpyReal(double alpha, std::span<const double> x, std::span<double> y);

// sum_i conj(a[i]) * b[i].
Complex DotConj(std::span<const Complex> a, std::span<const Complex> b);

// sum_i |a[i]|^2.
double NormSquared(std::span<const Complex> a);

// sum_i |a[i] - b[i]|^2.
double DistanceSquared(std::span<const Complex> a, std::span<const Complex> b);

// Per-backend entry points, used by the equivalence tests and benchmarks.
namespace scalar {
void Multiply(const Complex* a, const Complex* b, Complex* out, std::size_t n);
void Axpy(Complex alpha, const Complex* x, Complex* y, std::size_t n);
void AxpyReal(double alpha, const double* x, double* y, std::size_t n);
Complex DotConj(const Complex* a, const Complex* b, std::size_t n);
double NormSquared(const Complex* a, std::size_t n);
double DistanceSquared(const Complex* a, const Complex* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
// These operate on interleaved doubles so that the AVX2 translation unit
// never instantiates std::complex templates (which the linker could pick up
// for non-AVX callers).
void Multiply(const double* a, const double* b, double* out, std::size_t n);
void Axpy(double alpha_re, double alpha_im, const double* x, double* y,
          std::size_t n);
void AxpyReal(double alpha, const double* x, double* y, std::size_t n);
void DotConj(const double* a, const double* b, std::size_t n, double* re,
             double* im);
double NormSquared(const double* a, std::size_t n);
double DistanceSquared(const double* a, const double* b, std::size_t n);
}  // namespace avx2

}  // namespace cgoinv::kernels
