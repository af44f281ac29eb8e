// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cgoinv/errors.h"
#include "cgoinv/kernels.h"
#include "cgoinv/subspaces.h"

namespace cgoinv {
namespace {

constexpr int kDykstraCap = 10000;
// Sweeps between attempts to finish from Dykstra's active set.
constexpr int kPolishEvery = 25;

// Bandlimited coefficients are ordered lexicographically over a symmetric
// box, so the element with frequency -j sits at the mirrored index.
void HermitianPart(std::vector<Complex>& c) {
  const std::size_t m = c.size();
  for (std::size_t i = 0; i <= (m - 1) / 2; ++i) {
    const std::size_t j = m - 1 - i;
    const Complex avg = 0.5 * (c[i] + std::conj(c[j]));
    c[i] = avg;
    c[j] = std::conj(avg);
  }
}

// Oversampled grid used for the sup-norm of bandlimited elements.
TorusGrid FineGrid(const SubspaceBasis& basis) {
  int n = basis.has_grid() ? basis.grid().n() : 8;
  n = std::max(n, 4 * basis.spec().bandwidth + 4);
  if (n % 2) ++n;
  return TorusGrid(basis.dim(), 2 * n);
}

std::vector<Complex> BandCoefficients(const SubspaceBasis& basis,
                                      const Spectrum& s) {
  std::vector<Complex> c(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) c[i] = s.at(basis.frequency(i));
  return c;
}

// Real coordinates of a real bandlimited function: u = c_0 for k = 0, and
// for each pair (k, -k) with k the later slot, the coefficients of
// sqrt(2) cos(2 pi k.x) and -sqrt(2) sin(2 pi k.x). The map is an isometry.
struct RealCoordinates {
  std::vector<std::size_t> slot;
  std::vector<int> part;  // 0 constant, 1 cosine, 2 sine

  explicit RealCoordinates(std::size_t m) {
    for (std::size_t i = (m - 1) / 2; i < m; ++i) {
      if (i == m - 1 - i) {
        slot.push_back(i), part.push_back(0);
      } else {
        slot.push_back(i), part.push_back(1);
        slot.push_back(i), part.push_back(2);
      }
    }
  }
  std::size_t size() const { return slot.size(); }

  Eigen::VectorXd From(std::span<const Complex> c) const {
    Eigen::VectorXd u(size());
    for (std::size_t r = 0; r < size(); ++r) {
      const Complex z = c[slot[r]];
      u[r] = part[r] == 0   ? z.real()
             : part[r] == 1 ? std::sqrt(2.0) * z.real()
                            : std::sqrt(2.0) * z.imag();
    }
    return u;
  }
  std::vector<Complex> To(const Eigen::VectorXd& u, std::size_t m) const {
    std::vector<Complex> c(m, 0.0);
    for (std::size_t r = 0; r < size(); ++r) {
      const std::size_t i = slot[r], j = m - 1 - i;
      if (part[r] == 0) {
        c[i] += u[r];
      } else {
        const Complex z = part[r] == 1 ? Complex(u[r], 0.0) : Complex(0.0, u[r]);
        c[i] += z / std::sqrt(2.0);
        c[j] += std::conj(z) / std::sqrt(2.0);
      }
    }
    return c;
  }
  // Row of basis-function values at node x.
  void Row(const SubspaceBasis& basis, std::span<const double> x,
           Eigen::RowVectorXd& row) const {
    row.resize(static_cast<Eigen::Index>(size()));
    for (std::size_t r = 0; r < size(); ++r) {
      const auto k = basis.frequency(slot[r]);
      double phase = 0.0;
      for (std::size_t a = 0; a < k.size(); ++a) phase += k[a] * x[a];
      phase *= 2.0 * std::numbers::pi;
      row[r] = part[r] == 0   ? 1.0
               : part[r] == 1 ? std::sqrt(2.0) * std::cos(phase)
                              : -std::sqrt(2.0) * std::sin(phase);
    }
  }
};

double FineSup(const SubspaceBasis& basis, const TorusGrid& fine,
               std::span<const Complex> c) {
  const Field x = basis.SynthesizeOn(fine, c);
  double sup = 0.0;
  for (const Complex& v : x.values) sup = std::max(sup, std::abs(v.real()));
  return sup;
}

// Primal active-set method for min |u - u0| subject to |q(x_j)| <= R on the
// fine grid, warm-started from the nodes Dykstra is clipping. Each step
// solves the equality-constrained problem on the working set, then drops
// the most wrongly signed multiplier or adds the most violated node. The
// problem is strictly convex, so a KKT point is the projection. Returns
// false when the working set does not settle.
bool PolishActiveSet(const SubspaceBasis& basis, const TorusGrid& fine,
                     const RealCoordinates& coords, const Eigen::VectorXd& u0,
                     std::vector<std::size_t> active, std::vector<double> sign,
                     double R, std::vector<Complex>* out) {
  const Eigen::Index m = static_cast<Eigen::Index>(coords.size());
  const double scale = std::max(1.0, u0.norm());
  std::vector<int> node(fine.dim());
  std::vector<double> x(fine.dim());
  Eigen::RowVectorXd row;
  for (int step = 0; step < 4 * m + 16; ++step) {
    const Eigen::Index s = static_cast<Eigen::Index>(active.size());
    Eigen::VectorXd u = u0, lambda;
    if (s > 0) {
      Eigen::MatrixXd A(s, m);
      Eigen::VectorXd rhs(s);
      for (Eigen::Index r = 0; r < s; ++r) {
        fine.NodeAt(active[r], node);
        for (int a = 0; a < fine.dim(); ++a) x[a] = node[a] * fine.spacing();
        coords.Row(basis, x, row);
        A.row(r) = row;
        rhs[r] = sign[r] * R;
      }
      const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(
          A * A.transpose());
      lambda = cod.solve(A * u0 - rhs);
      u = u0 - A.transpose() * lambda;
      if ((A * u - rhs).cwiseAbs().maxCoeff() > 1e-11 * R) return false;
      Eigen::Index worst = -1;
      double most = -1e-12 * scale;
      for (Eigen::Index r = 0; r < s; ++r) {
        if (lambda[r] * sign[r] < most) most = lambda[r] * sign[r], worst = r;
      }
      if (worst >= 0) {
        active.erase(active.begin() + worst);
        sign.erase(sign.begin() + worst);
        continue;
      }
    }
    std::vector<Complex> c = coords.To(u, basis.size());
    const Field values = basis.SynthesizeOn(fine, c);
    std::size_t violated = values.values.size();
    double excess = R * 1e-12;
    for (std::size_t j = 0; j < values.values.size(); ++j) {
      const double e = std::abs(values.values[j].real()) - R;
      if (e > excess) excess = e, violated = j;
    }
    if (violated == values.values.size()) {
      *out = std::move(c);
      return true;
    }
    if (std::find(active.begin(), active.end(), violated) != active.end()) return false;
    active.push_back(violated);
    sign.push_back(values.values[violated].real() > 0.0 ? 1.0 : -1.0);
  }
  return false;
}

std::vector<Complex> DykstraBandlimited(const SubspaceBasis& basis,
                                        std::vector<Complex> c, double R,
                                        double tol) {
  const TorusGrid fine = FineGrid(basis);
  if (FineSup(basis, fine, c) <= R) return c;
  Field x = basis.SynthesizeOn(fine, c);
  for (Complex& v : x.values) v = v.real();

  const RealCoordinates coords(basis.size());
  const Eigen::VectorXd u0 = coords.From(c);
  const std::size_t size = fine.size();
  std::vector<Complex> p(size, 0.0), q(size, 0.0), y(size), tmp(size);
  std::vector<std::size_t> active;
  std::vector<double> sign;
  Spectrum spec(fine);
  for (int sweep = 0; sweep < kDykstraCap; ++sweep) {
    // y = P_band(x + p)
    for (std::size_t i = 0; i < size; ++i) tmp[i] = x.values[i] + p[i];
    ForwardFft(fine, tmp, spec.coeffs);
    c = BandCoefficients(basis, spec);
    HermitianPart(c);
    Field band = basis.SynthesizeOn(fine, c);
    for (std::size_t i = 0; i < size; ++i) {
      y[i] = band.values[i].real();
      p[i] = tmp[i] - y[i];
    }
    // x' = P_box(y + q)
    double diff2 = 0.0;
    active.clear();
    sign.clear();
    for (std::size_t i = 0; i < size; ++i) {
      const double v = (y[i] + q[i]).real();
      const double clipped = std::clamp(v, -R, R);
      q[i] = v - clipped;
      if (v != clipped) {
        active.push_back(i);
        sign.push_back(v > 0.0 ? 1.0 : -1.0);
      }
      diff2 += std::norm(clipped - x.values[i]);
      x.values[i] = clipped;
    }
    if (std::sqrt(diff2 / size) <= tol) return c;
    if (sweep % kPolishEvery == kPolishEvery - 1 &&
        active.size() <= 4 * coords.size()) {
      std::vector<Complex> exact;
      if (PolishActiveSet(basis, fine, coords, u0, active, sign, R, &exact)) {
        return exact;
      }
    }
  }
  throw ProjectionError("Dykstra projection onto W_R did not converge");
}

}  // namespace

std::vector<Complex> ProjectBoxCoefficients(std::span<const Complex> c_in,
                                            const SubspaceBasis& basis,
                                            const BoxConstraint& box,
                                            double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("projection tolerance must be > 0");
  if (c_in.size() != basis.size()) throw DimensionError("coefficient count != dim W");
  if (basis.is_piecewise()) {
    std::vector<Complex> v = basis.CellValues(c_in);
    for (Complex& x : v) x = std::clamp(x.real(), -box.R, box.R);
    std::vector<Complex> out = basis.FromCellValues(v);
    // The Haar change of basis is real; drop its round-off imaginary parts.
    for (Complex& x : out) x = x.real();
    return out;
  }
  std::vector<Complex> c(c_in.begin(), c_in.end());
  HermitianPart(c);
  return DykstraBandlimited(basis, std::move(c), box.R, tol);
}

Field ProjectBox(const Field& f, const SubspaceBasis& basis,
                 const BoxConstraint& box, double tol) {
  return basis.Synthesize(
      ProjectBoxCoefficients(basis.Analyze(f), basis, box, tol));
}

std::vector<Complex> RandomCoefficients(const SubspaceBasis& basis,
                                        const BoxConstraint& box,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  if (basis.is_piecewise()) {
    std::uniform_real_distribution<double> value(-box.R, box.R);
    std::vector<Complex> v(basis.size());
    for (Complex& x : v) x = value(rng);
    std::vector<Complex> c = basis.FromCellValues(v);
    for (Complex& x : c) x = x.real();
    return c;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Complex> c(basis.size());
  for (Complex& x : c) x = Complex(normal(rng), normal(rng));
  HermitianPart(c);
  const Field fine = basis.SynthesizeOn(FineGrid(basis), c);
  double sup = 0.0;
  for (const Complex& v : fine.values) sup = std::max(sup, std::abs(v));
  std::uniform_real_distribution<double> fraction(0.5, 1.0);
  const double scale = sup > 0.0 ? box.R * fraction(rng) / sup : 0.0;
  for (Complex& x : c) x *= scale;
  return c;
}

Field RandomElement(const SubspaceBasis& basis, const BoxConstraint& box,
                    std::uint64_t seed) {
  return basis.Synthesize(RandomCoefficients(basis, box, seed));
}

}  // namespace cgoinv
