// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <cstring>

#include "cgoinv/errors.h"
#include "cgoinv/kernels.h"

namespace cgoinv::kernels {
namespace {

bool DetectAvx2() {
#if defined(CGOINV_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend InitialBackend() {
  const char* forced = std::getenv("CGOINV_KERNELS");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) {
    return Backend::kScalar;
  }
  return DetectAvx2() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& Active() {
  static std::atomic<Backend> backend{InitialBackend()};
  return backend;
}

inline bool UseAvx2() {
  return Active().load(std::memory_order_relaxed) == Backend::kAvx2;
}

inline const double* Raw(const Complex* p) {
  return reinterpret_cast<const double*>(p);
}
inline double* Raw(Complex* p) { return reinterpret_cast<double*>(p); }

void CheckSize(std::size_t a, std::size_t b) {
  if (a != b) throw InvalidArgument("kernel operands differ in length");
}

}  // namespace

std::string_view BackendName(Backend backend) {
  return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

bool Avx2Available() {
  static const bool available = DetectAvx2();
  return available;
}

Backend ActiveBackend() { return Active().load(); }

void SetBackend(Backend backend) {
  if (backend == Backend::kAvx2 && !Avx2Available()) {
    throw InvalidArgument("AVX2 kernels are not available on this machine");
  }
  Active().store(backend);
}

void Multiply(std::span<const Complex> a, std::span<const Complex> b,
              std::span<Complex> out) {
  CheckSize(a.size(), b.size());
  CheckSize(a.size(), out.size());
  if (UseAvx2()) {
    avx2::Multiply(Raw(a.data()), Raw(b.data()), Raw(out.data()), a.size());
  } else {
    scalar::Multiply(a.data(), b.data(), out.data(), a.size());
  }
}

void Axpy(Complex alpha, std::span<const Complex> x, std::span<Complex> y) {
  CheckSize(x.size(), y.size());
  if (UseAvx2()) {
    avx2::Axpy(alpha.real(), alpha.imag(), Raw(x.data()), Raw(y.data()),
               x.size());
  } else {
    scalar::Axpy(alpha, x.data(), y.data(), x.size());
  }
}

void AxpyReal(double alpha, std::span<const double> x, std::span<double> y) {
  CheckSize(x.size(), y.size());
  if (UseAvx2()) {
    avx2::AxpyReal(alpha, x.data(), y.data(), x.size());
  } else {
    scalar::AxpyReal(alpha, x.data(), y.data(), x.size());
  }
}

Complex DotConj(std::span<const Complex> a, std::span<const Complex> b) {
  CheckSize(a.size(), b.size());
  if (UseAvx2()) {
    double re = 0.0, im = 0.0;
    avx2::DotConj(Raw(a.data()), Raw(b.data()), a.size(), &re, &im);
    return {re, im};
  }
  return scalar::DotConj(a.data(), b.data(), a.size());
}

double NormSquared(std::span<const Complex> a) {
  if (UseAvx2()) return avx2::NormSquared(Raw(a.data()), a.size());
  return scalar::NormSquared(a.data(), a.size());
}

double DistanceSquared(std::span<const Complex> a,
                       std::span<const Complex> b) {
  CheckSize(a.size(), b.size());
  if (UseAvx2()) {
    return avx2::DistanceSquared(Raw(a.data()), Raw(b.data()), a.size());
  }
  return scalar::DistanceSquared(a.data(), b.data(), a.size());
}

}  // namespace cgoinv::kernels
