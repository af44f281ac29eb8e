// SPDX-License-Identifier: Apache-2.0
//
// Finite-dimensional prior spaces W: bandlimited trigonometric polynomials,
// piecewise constants on interval partitions, and dyadic Haar wavelets.
// W is a space of genuine functions on T^d. Fourier coefficients and the
// integrals used by the measurement operators are evaluated in closed
// form; grid samples serve the PDE solver and the projections.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cgoinv/spectral.h"

namespace cgoinv {

enum class Family { kBandlimited, kPiecewise, kHaar };

std::string_view FamilyName(Family family);
Family ParseFamily(std::string_view name);

// Axis-aligned box corner + [0, sides].
struct Cell {
  std::vector<double> corner;
  std::vector<double> sides;

  double Volume() const;
};

struct Partition {
  int dim = 0;
  std::vector<Cell> cells;

  std::size_t size() const { return cells.size(); }
  // A = min_{i,j} a_j^i with side_j = a_j^i M^{-1/d}.
  double MinWeight() const;
  // Throws InvalidArgument unless every cell has positive sides, lies in
  // [0,1]^d and the interiors are pairwise disjoint.
  void Validate() const;

  // Tensor grid with per_axis[a] equal slabs along axis a.
  static Partition Uniform(std::span<const int> per_axis);
  // 2^level equal slabs per axis, M = 2^{level d}.
  static Partition Dyadic(int dim, int level);
};

struct SubspaceSpec {
  Family family = Family::kPiecewise;
  int dim = 3;
  int bandwidth = 0;  // B, bandlimited only
  int level = 0;      // Haar only
  Partition partition;  // piecewise only
  std::optional<double> radius;  // R of W_R when given in the spec file

  // dim W.
  std::size_t Dimension() const;

  static SubspaceSpec Bandlimited(int dim, int bandwidth);
  static SubspaceSpec Piecewise(Partition partition);
  static SubspaceSpec Haar(int dim, int level);
};

struct BoxConstraint {
  double R;

  explicit BoxConstraint(double radius);
};

// Closed-form integral of e^{-2 pi i k.x} over the cell:
// prod_j s_j sinc(pi k_j s_j) e^{-2 pi i k_j (a_j + s_j / 2)}.
Complex CharFourier(const Cell& cell, std::span<const int> k);

// Closed-form integral of e^{w.x} over the cell for complex w.
Complex CellExpIntegral(const Cell& cell, std::span<const Complex> w);

// Orthonormal basis {w_1, ..., w_M} of W. The grid is optional: without
// one only the closed-form queries (Fourier coefficients) are available,
// which is what the balancing computations need and which also admits
// partitions that are not aligned with any grid.
class SubspaceBasis {
 public:
  explicit SubspaceBasis(SubspaceSpec spec);
  SubspaceBasis(SubspaceSpec spec, const TorusGrid& grid);

  const SubspaceSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  std::size_t size() const { return size_; }
  bool has_grid() const { return grid_.has_value(); }
  const TorusGrid& grid() const;

  // Exact coefficient hat{w}_i(k) = integral of w_i e^{-2 pi i k.x}.
  Complex FourierCoefficient(std::size_t i, std::span<const int> k) const;
  // out[i] = hat{w}_i(k) for all i.
  void FourierRow(std::span<const int> k, std::span<Complex> out) const;

  // Grid samples of w_i.
  const Field& element(std::size_t i) const;

  // c_i = <f, w_i> by grid quadrature. Exact for f in W.
  std::vector<Complex> Analyze(const Field& f) const;
  // sum_i c_i w_i on the grid.
  Field Synthesize(std::span<const Complex> c) const;
  // The same function evaluated on an arbitrary grid.
  Field SynthesizeOn(const TorusGrid& grid, std::span<const Complex> c) const;

  // integral over T^d of q(x) e^{w.x} g(x) dx for q = sum_i c_i w_i and
  // g(x) = sum_m ghat(m) e^{2 pi i m.x} over the grid frequency box.
  // Evaluated in closed form, cell by cell or exponential by exponential.
  Complex Integrate(std::span<const Complex> c, const Spectrum& ghat,
                    std::span<const Complex> w) const;

  // Piecewise-constant families: value of q = sum_i c_i w_i on each cell
  // of the underlying partition, and back.
  bool is_piecewise() const { return spec_.family != Family::kBandlimited; }
  const Partition& cells() const { return cells_; }
  std::vector<Complex> CellValues(std::span<const Complex> c) const;
  std::vector<Complex> FromCellValues(std::span<const Complex> v) const;

  // Bandlimited family: frequency of element i.
  std::span<const int> frequency(std::size_t i) const;

 private:
  void BuildClosedForm();
  void BuildSamples();

  SubspaceSpec spec_;
  std::size_t size_ = 0;
  std::optional<TorusGrid> grid_;
  Partition cells_;                 // piecewise, Haar
  std::vector<double> haar_;        // M x M row-major, w_i = sum_c H_ic f_c
  std::vector<int> frequencies_;    // bandlimited, M x d
  std::vector<Field> samples_;
  std::vector<std::vector<std::uint32_t>> cell_nodes_;
};

// P_W f.
Field ProjectSubspace(const Field& f, const SubspaceBasis& basis);

// Nearest point of W_R = {q in W real : ||q||_inf <= R}. Piecewise and Haar
// bases clip cell values exactly; the bandlimited basis runs Dykstra's
// alternating projections with the sup norm checked on a 2x oversampled
// grid, stopping when successive iterates differ by <= tol in L^2. Every
// 25 sweeps the nodes Dykstra is clipping warm-start an active-set solve of
// the underlying quadratic program, whose KKT point is returned as the
// exact projection. Throws ProjectionError after 10^4
// Dykstra sweeps.
Field ProjectBox(const Field& f, const SubspaceBasis& basis,
                 const BoxConstraint& box, double tol = 1e-10);

// Same, on coefficient vectors.
std::vector<Complex> ProjectBoxCoefficients(std::span<const Complex> c,
                                            const SubspaceBasis& basis,
                                            const BoxConstraint& box,
                                            double tol = 1e-10);

// Deterministic random element of W_R.
Field RandomElement(const SubspaceBasis& basis, const BoxConstraint& box,
                    std::uint64_t seed);
std::vector<Complex> RandomCoefficients(const SubspaceBasis& basis,
                                        const BoxConstraint& box,
                                        std::uint64_t seed);

}  // namespace cgoinv
