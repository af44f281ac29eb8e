// SPDX-License-Identifier: Apache-2.0
//
// Uniform grids on the unit torus T^d = [0,1)^d, the unitary Fourier
// analysis used throughout (q^(k) = integral of q(x) e^{-2 pi i k.x}), and
// orderings of the measurement frequencies.
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cgoinv {

using Complex = std::complex<double>;

// n^d uniform nodes x_j = j/n on T^d, d >= 3, n even and >= 8. Nodes and
// Fourier coefficients are both stored row-major with axis 0 slowest;
// Fourier slot i on an axis holds frequency i for i <= n/2 and i - n
// otherwise, so the representable box is {-n/2+1, ..., n/2}^d.
class TorusGrid {
 public:
  TorusGrid(int dim, int points_per_axis);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double spacing() const { return 1.0 / n_; }
  std::size_t size() const { return size_; }

  int min_frequency() const { return -n_ / 2 + 1; }
  int max_frequency() const { return n_ / 2; }

  bool InBand(std::span<const int> k) const;
  // Throws FrequencyOutOfBand when k is outside the box.
  std::size_t FrequencyIndex(std::span<const int> k) const;
  void FrequencyAt(std::size_t index, std::span<int> k) const;
  void NodeAt(std::size_t index, std::span<int> j) const;

  bool operator==(const TorusGrid& other) const = default;

 private:
  int dim_;
  int n_;
  std::size_t size_;
};

// Complex samples on a grid; the optional support mask marks the nodes of
// a subdomain, with values forced to zero outside it (extension by zero).
struct Field {
  TorusGrid grid;
  std::vector<Complex> values;
  std::optional<std::vector<std::uint8_t>> support_mask;

  explicit Field(const TorusGrid& g) : grid(g), values(g.size()) {}
  Field(const TorusGrid& g, std::vector<Complex> v);

  static Field Zeros(const TorusGrid& g) { return Field(g); }
  // Samples f at every node; f receives the node coordinates.
  static Field Sample(const TorusGrid& g,
                      const std::function<Complex(std::span<const double>)>& f);

  void SetSupportMask(std::vector<std::uint8_t> mask);
  void ApplyMask();
};

// Grid L^2(T^d) quantities: (1/n^d) sum_j ...
double L2Norm(const Field& f);
double L2Distance(const Field& f, const Field& g);
// <f, g> = (1/n^d) sum_j f(x_j) conj(g(x_j)).
Complex Inner(const Field& f, const Field& g);
double SupNorm(const Field& f);
double MaxImagAbs(const Field& f);

// Fourier coefficients over the grid's frequency box (grid index order).
struct Spectrum {
  TorusGrid grid;
  std::vector<Complex> coeffs;

  explicit Spectrum(const TorusGrid& g) : grid(g), coeffs(g.size()) {}

  Complex at(std::span<const int> k) const {
    return coeffs[grid.FrequencyIndex(k)];
  }
  Complex& at(std::span<const int> k) { return coeffs[grid.FrequencyIndex(k)]; }
};

// Trapezoidal-rule Fourier coefficients (1/n^d) sum_j f(x_j) e^{-2 pi i k.x_j}.
// Unitary with respect to the grid L^2 norm and the l^2 coefficient norm.
Spectrum ForwardTransform(const Field& f);
// f(x_j) = sum_k c_k e^{2 pi i k.x_j}.
Field InverseTransform(const Spectrum& coeffs);

// Buffer-level transforms used in the solver loops. `in` and `out` must both
// have grid.size() elements and may alias.
void ForwardFft(const TorusGrid& grid, std::span<const Complex> in,
                std::span<Complex> out);
// sum_j in_j e^{-2 pi i k.x_j} without the 1/n^d factor.
void ForwardFftUnscaled(const TorusGrid& grid, std::span<const Complex> in,
                        std::span<Complex> out);
void InverseFft(const TorusGrid& grid, std::span<const Complex> in,
                std::span<Complex> out);

// Spectral Laplacian: multiplies coefficient k by -4 pi^2 |k|^2.
Field Laplacian(const Field& f);
// || grad f ||_{L^2} via Parseval.
double GradientL2Norm(const Field& f);

// ---------------------------------------------------------------------------
// Frequency orderings rho : N -> Z^d.

enum class OrderingKind { kBox, kHyperbolic };

std::string_view OrderingName(OrderingKind kind);
// Accepts "box" and "hyperbolic"; throws InvalidArgument otherwise.
OrderingKind ParseOrderingKind(std::string_view name);

// Primary sort key: max-norm for box, prod_j max(|k_j|, 1) for hyperbolic.
std::int64_t OrderingKey(OrderingKind kind, std::span<const int> k);

// The first `size()` elements of an ordering. Points are sorted by the
// primary key, then by |k|^2, then lexicographically.
class FreqOrdering {
 public:
  FreqOrdering(OrderingKind kind, int dim, std::vector<int> points);

  OrderingKind kind() const { return kind_; }
  int dim() const { return dim_; }
  std::size_t size() const { return points_.size() / dim_; }

  // 0-based: element l0 is k_{l0+1}.
  std::span<const int> operator[](std::size_t l0) const {
    return {points_.data() + l0 * dim_, static_cast<std::size_t>(dim_)};
  }

 private:
  OrderingKind kind_;
  int dim_;
  std::vector<int> points_;
};

FreqOrdering MakeOrdering(OrderingKind kind, int dim, std::size_t count);

// Documented growth constants C_rho with |k_l| <= C_rho l^{1/d} over the
// first 10^4 elements for d = 3.
inline constexpr double kBoxGrowthConstant = 1.0;
inline constexpr double kHyperbolicGrowthConstant = 3.0;

// CSV with header l,k_1,...,k_d; l is 1-based.
void WriteOrderingCsv(std::ostream& out, const FreqOrdering& ordering);

// ---------------------------------------------------------------------------
// gamma_s^2 = sum_{k in Z^d} (|k|^s + 1)^{-(2 - 2d/p)}.

struct GammaSum {
  double value;       // estimate of the full lattice sum
  double tail_bound;  // bound on |value - true sum|
  int half_width;     // lattice points with ||k||_inf <= half_width summed
};

// Requires 2s(1 - d/p) > d; throws DivergentSeriesError otherwise. The
// returned tail_bound is <= tol.
GammaSum GammaS(double s, double p, int dim, double tol);

// ---------------------------------------------------------------------------
// CGO1 field files: "CGO1", u32 d, u32 n (little endian), then n^d
// interleaved float64 (re, im) samples in row-major node order.

void WriteField(std::ostream& out, const Field& f);
Field ReadField(std::istream& in);
void WriteFieldFile(const std::string& path, const Field& f);
Field ReadFieldFile(const std::string& path);

}  // namespace cgoinv
