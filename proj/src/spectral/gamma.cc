// SPDX-License-Identifier: Apache-2.0
//
// Lattice sum sum_{k in Z^d} phi(|k|) with phi(r) = (r^s + 1)^{-e},
// e = 2 - 2d/p. The sum is split at the cube ||k||_inf <= K:
//
//   sum_k phi = S_K + sum_{||k||_inf > K} phi(k)
//             = S_K + (I_total - I_cube) + err
//
// where I_total is the integral of phi over R^d (closed form through the
// Beta function), I_cube the integral over [-K-1/2, K+1/2]^d (graded tensor
// Gauss-Legendre), and err the midpoint-rule error of the unit cells outside
// the cube, bounded through the Hessian of phi by
//
//   |err| <= (d/24) sup |D^2 phi| summed over the outer cells.
//
// S_K is accumulated from the representation counts of |k|^2 so each radius
// is evaluated once.
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "cgoinv/errors.h"
#include "cgoinv/kernels.h"
#include "cgoinv/spectral.h"

namespace cgoinv {
namespace {

struct Summand {
  double s;
  double e;
  double operator()(double r) const {
    return std::pow(1.0 + std::pow(r, s), -e);
  }
};

double SphereArea(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / boost::math::tgamma(0.5 * d);
}

// Bound on the midpoint error of all unit cells outside ||x||_inf <= K + 1/2.
double MidpointBound(const Summand& phi, int d, int half_width) {
  const double h = 0.5 * std::sqrt(static_cast<double>(d));
  const double u0 = half_width + 0.5 - 2.0 * h;
  if (u0 <= 0.0) return std::numeric_limits<double>::infinity();
  const double se = phi.s * phi.e;
  // |phi''| and |phi'|/r are both <= hessian_const * r^{-se-2}.
  const double hessian_const =
      se * std::max(std::abs(phi.s - 1.0) + (phi.e + 1.0) * phi.s, 1.0);
  const double power = se + 2.0;
  return (d / 24.0) * hessian_const * SphereArea(d) *
         std::pow(1.0 + 2.0 * h / u0, d - 1) * std::pow(u0, d - power) /
         (power - d);
}

// Counts c[m] = #{k in Z^d : ||k||_inf <= K, |k|^2 = m}.
std::vector<double> SquareNormCounts(int d, int half_width) {
  const std::size_t k2 = static_cast<std::size_t>(half_width) * half_width;
  std::vector<double> counts(1, 1.0);
  for (int axis = 0; axis < d; ++axis) {
    std::vector<double> next(counts.size() + k2, 0.0);
    for (int v = 0; v <= half_width; ++v) {
      const double weight = v == 0 ? 1.0 : 2.0;
      const std::size_t shift = static_cast<std::size_t>(v) * v;
      kernels::AxpyReal(weight, counts,
                        std::span<double>(next.data() + shift, counts.size()));
    }
    counts = std::move(next);
  }
  return counts;
}

// Integral of phi(|x|) over [0, L]^d on a graded partition, exploiting the
// permutation symmetry of the integrand.
template <int Order>
double CubeIntegral(const Summand& phi, int d, const std::vector<double>& cuts) {
  using Rule = boost::math::quadrature::gauss<double, Order>;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  // Full symmetric node list on [-1, 1].
  std::vector<double> nodes, node_weights;
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    nodes.push_back(abscissa[i]);
    node_weights.push_back(weights[i]);
    if (abscissa[i] != 0.0) {
      nodes.push_back(-abscissa[i]);
      node_weights.push_back(weights[i]);
    }
  }
  const int intervals = static_cast<int>(cuts.size()) - 1;
  const int q = static_cast<int>(nodes.size());

  // Non-decreasing interval tuples i_0 <= ... <= i_{d-1}.
  std::vector<int> tuple(d, 0);
  double total = 0.0;
  std::vector<int> node(d);
  const double log_fact_d = std::lgamma(d + 1.0);
  while (true) {
    // multiplicity = d! / prod(run lengths!)
    double log_mult = log_fact_d;
    for (int a = 0; a < d;) {
      int b = a;
      while (b < d && tuple[b] == tuple[a]) ++b;
      log_mult -= std::lgamma(b - a + 1.0);
      a = b;
    }
    const double multiplicity = std::round(std::exp(log_mult));

    double box = 0.0;
    std::fill(node.begin(), node.end(), 0);
    while (true) {
      double r2 = 0.0, weight = 1.0;
      for (int a = 0; a < d; ++a) {
        const double lo = cuts[tuple[a]], hi = cuts[tuple[a] + 1];
        const double half = 0.5 * (hi - lo);
        const double xa = lo + half * (1.0 + nodes[node[a]]);
        r2 += xa * xa;
        weight *= half * node_weights[node[a]];
      }
      box += weight * phi(std::sqrt(r2));
      int a = d - 1;
      while (a >= 0 && node[a] == q - 1) {
        node[a] = 0;
        --a;
      }
      if (a < 0) break;
      ++node[a];
    }
    total += multiplicity * box;

    int a = d - 1;
    while (a >= 0 && tuple[a] == intervals - 1) --a;
    if (a < 0) break;
    ++tuple[a];
    for (int b = a + 1; b < d; ++b) tuple[b] = tuple[a];
  }
  return total;
}

std::vector<double> GradedCuts(double length) {
  std::vector<double> cuts{0.0};
  for (double c = 1.0 / 64.0; c < length; c *= 2.0) cuts.push_back(c);
  cuts.push_back(length);
  return cuts;
}

}  // namespace

GammaSum GammaS(double s, double p, int dim, double tol) {
  if (dim < 1) throw DimensionError("gamma_s needs d >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("gamma_s tolerance must be positive");
  if (!(s > 0.0) || !(p > dim) || !(2.0 * s * (1.0 - dim / p) > dim)) {
    throw DivergentSeriesError(
        "gamma_s diverges: requires 2s(1 - d/p) > d");
  }
  const Summand phi{s, 2.0 - 2.0 * dim / p};
  // Smallest K whose midpoint bound leaves half the budget for quadrature.
  auto fits = [&](int k) { return MidpointBound(phi, dim, k) <= 0.5 * tol; };
  int hi = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(dim)))) + 1;
  while (!fits(hi)) {
    if (hi > (1 << 20)) {
      throw InvalidArgument("gamma_s tolerance too small for direct summation");
    }
    hi *= 2;
  }
  int lo = hi / 2;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (fits(mid) ? hi : lo) = mid;
  }
  int half_width = hi;

  const double total_integral =
      SphereArea(dim) / phi.s *
      boost::math::beta(dim / phi.s, phi.e - dim / phi.s);

  for (int attempt = 0; attempt < 8; ++attempt) {
    const std::vector<double> counts = SquareNormCounts(dim, half_width);
    double lattice = 0.0;
    for (std::size_t m = counts.size(); m-- > 0;) {
      if (counts[m] != 0.0) {
        lattice += counts[m] * phi(std::sqrt(static_cast<double>(m)));
      }
    }
    const double length = half_width + 0.5;
    const std::vector<double> cuts = GradedCuts(length);
    const double scale = std::pow(2.0, dim);
    const double cube_hi = scale * CubeIntegral<16>(phi, dim, cuts);
    const double cube_lo = scale * CubeIntegral<10>(phi, dim, cuts);

    const double value = lattice + (total_integral - cube_hi);
    const double rounding = 64.0 * std::numeric_limits<double>::epsilon() *
                            (lattice + total_integral + cube_hi);
    const double bound = MidpointBound(phi, dim, half_width) +
                         std::abs(cube_hi - cube_lo) + rounding;
    if (bound <= tol) return {value, bound, half_width};
    half_width = static_cast<int>(std::ceil(half_width * 1.25));
  }
  throw InvalidArgument("gamma_s could not reach the requested tolerance");
}

}  // namespace cgoinv
