// SPDX-License-Identifier: Apache-2.0
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "cgoinv/errors.h"
#include "cgoinv/kernels.h"
#include "cgoinv/spectral.h"

namespace cgoinv {

TorusGrid::TorusGrid(int dim, int points_per_axis)
    : dim_(dim), n_(points_per_axis), size_(1) {
  if (dim < 3) throw DimensionError("torus grid needs d >= 3");
  if (points_per_axis < 8 || points_per_axis % 2 != 0) {
    throw InvalidArgument("points per axis must be even and >= 8");
  }
  for (int a = 0; a < dim; ++a) {
    if (size_ > (std::size_t{1} << 40) / static_cast<std::size_t>(n_)) {
      throw InvalidArgument("grid too large");
    }
    size_ *= static_cast<std::size_t>(n_);
  }
}

bool TorusGrid::InBand(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dim_) return false;
  return std::all_of(k.begin(), k.end(), [&](int v) {
    return v >= min_frequency() && v <= max_frequency();
  });
}

std::size_t TorusGrid::FrequencyIndex(std::span<const int> k) const {
  if (!InBand(k)) {
    throw FrequencyOutOfBand("frequency outside the grid box");
  }
  std::size_t index = 0;
  for (int v : k) {
    index = index * n_ + static_cast<std::size_t>(v >= 0 ? v : v + n_);
  }
  return index;
}

void TorusGrid::FrequencyAt(std::size_t index, std::span<int> k) const {
  for (int a = dim_ - 1; a >= 0; --a) {
    const int slot = static_cast<int>(index % n_);
    index /= n_;
    k[a] = slot <= n_ / 2 ? slot : slot - n_;
  }
}

void TorusGrid::NodeAt(std::size_t index, std::span<int> j) const {
  for (int a = dim_ - 1; a >= 0; --a) {
    j[a] = static_cast<int>(index % n_);
    index /= n_;
  }
}

Field::Field(const TorusGrid& g, std::vector<Complex> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw InvalidArgument("field sample count does not match the grid");
  }
}

Field Field::Sample(const TorusGrid& g,
                    const std::function<Complex(std::span<const double>)>& f) {
  Field out(g);
  std::vector<int> j(g.dim());
  std::vector<double> x(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.NodeAt(i, j);
    for (int a = 0; a < g.dim(); ++a) x[a] = j[a] * g.spacing();
    out.values[i] = f(x);
  }
  return out;
}

void Field::SetSupportMask(std::vector<std::uint8_t> mask) {
  if (mask.size() != grid.size()) {
    throw InvalidArgument("support mask size does not match the grid");
  }
  support_mask = std::move(mask);
  ApplyMask();
}

void Field::ApplyMask() {
  if (!support_mask) return;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if ((*support_mask)[i] == 0) values[i] = 0.0;
  }
}

namespace {

void RequireSameGrid(const Field& f, const Field& g) {
  if (!(f.grid == g.grid)) throw InvalidArgument("fields live on different grids");
}

}  // namespace

double L2Norm(const Field& f) {
  return std::sqrt(kernels::NormSquared(f.values) / f.grid.size());
}

double L2Distance(const Field& f, const Field& g) {
  RequireSameGrid(f, g);
  return std::sqrt(kernels::DistanceSquared(f.values, g.values) /
                   f.grid.size());
}

Complex Inner(const Field& f, const Field& g) {
  RequireSameGrid(f, g);
  // DotConj conjugates its first argument.
  return kernels::DotConj(g.values, f.values) / static_cast<double>(f.grid.size());
}

double SupNorm(const Field& f) {
  double m = 0.0;
  for (const Complex& v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double MaxImagAbs(const Field& f) {
  double m = 0.0;
  for (const Complex& v : f.values) m = std::max(m, std::abs(v.imag()));
  return m;
}

// ---------------------------------------------------------------------------
// FFTW plan cache. Planning is serialized; fftw_execute_dft on an existing
// plan is thread safe. FFTW_ESTIMATE keeps plans (and so results)
// deterministic from run to run.

namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

fftw_plan GetPlan(const TorusGrid& grid, int sign) {
  static std::map<std::tuple<int, int, int>, PlanHandle> cache;
  std::lock_guard<std::mutex> lock(PlannerMutex());
  const auto key = std::make_tuple(grid.dim(), grid.n(), sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second.get();

  std::vector<int> dims(grid.dim(), grid.n());
  std::vector<Complex> a(grid.size()), b(grid.size());
  fftw_plan plan = fftw_plan_dft(
      grid.dim(), dims.data(), reinterpret_cast<fftw_complex*>(a.data()),
      reinterpret_cast<fftw_complex*>(b.data()), sign,
      FFTW_ESTIMATE);
  if (plan == nullptr) throw Error("FFTW planning failed");
  cache.emplace(key, PlanHandle(plan));
  return plan;
}

void Execute(const TorusGrid& grid, int sign, std::span<const Complex> in,
             std::span<Complex> out) {
  if (in.size() != grid.size() || out.size() != grid.size()) {
    throw InvalidArgument("FFT buffer size does not match the grid");
  }
  fftw_plan plan = GetPlan(grid, sign);
  // Plans are made on malloc'd (16-byte aligned) arrays and use SIMD codelets,
  // so misaligned buffers go through aligned scratch.
  auto* in_ptr = reinterpret_cast<double*>(const_cast<Complex*>(in.data()));
  auto* out_ptr = reinterpret_cast<double*>(out.data());
  if (fftw_alignment_of(in_ptr) != 0 || fftw_alignment_of(out_ptr) != 0) {
    thread_local std::vector<Complex> src, dst;
    src.assign(in.begin(), in.end());
    dst.resize(out.size());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(src.data()),
                     reinterpret_cast<fftw_complex*>(dst.data()));
    std::copy(dst.begin(), dst.end(), out.begin());
    return;
  }
  if (in.data() == out.data()) {
    thread_local std::vector<Complex> scratch;
    scratch.assign(in.begin(), in.end());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(scratch.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
  } else {
    // FFTW's new-array execute takes a non-const input but leaves it intact
    // for out-of-place complex transforms.
    fftw_execute_dft(
        plan,
        reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
        reinterpret_cast<fftw_complex*>(out.data()));
  }
}

}  // namespace

void ForwardFft(const TorusGrid& grid, std::span<const Complex> in,
                std::span<Complex> out) {
  Execute(grid, FFTW_FORWARD, in, out);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (Complex& c : out) c *= scale;
}

void ForwardFftUnscaled(const TorusGrid& grid, std::span<const Complex> in,
                        std::span<Complex> out) {
  Execute(grid, FFTW_FORWARD, in, out);
}

void InverseFft(const TorusGrid& grid, std::span<const Complex> in,
                std::span<Complex> out) {
  Execute(grid, FFTW_BACKWARD, in, out);
}

Spectrum ForwardTransform(const Field& f) {
  Spectrum s(f.grid);
  ForwardFft(f.grid, f.values, s.coeffs);
  return s;
}

Field InverseTransform(const Spectrum& coeffs) {
  Field f(coeffs.grid);
  InverseFft(coeffs.grid, coeffs.coeffs, f.values);
  return f;
}

Field Laplacian(const Field& f) {
  Spectrum s = ForwardTransform(f);
  std::vector<int> k(f.grid.dim());
  constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    f.grid.FrequencyAt(i, k);
    double k2 = 0.0;
    for (int v : k) k2 += static_cast<double>(v) * v;
    s.coeffs[i] *= -kFourPiSq * k2;
  }
  return InverseTransform(s);
}

double GradientL2Norm(const Field& f) {
  const Spectrum s = ForwardTransform(f);
  std::vector<int> k(f.grid.dim());
  constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;
  double acc = 0.0;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    f.grid.FrequencyAt(i, k);
    double k2 = 0.0;
    for (int v : k) k2 += static_cast<double>(v) * v;
    acc += kFourPiSq * k2 * std::norm(s.coeffs[i]);
  }
  return std::sqrt(acc);
}

}  // namespace cgoinv
