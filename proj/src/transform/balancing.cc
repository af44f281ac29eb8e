// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cgoinv/errors.h"
#include "cgoinv/transform.h"

namespace cgoinv {

double BalancingNormFromMatrix(const Eigen::MatrixXcd& C, std::size_t N) {
  if (N > static_cast<std::size_t>(C.rows())) throw InvalidArgument("N exceeds the matrix rows");
  const Eigen::Index M = C.cols();
  if (N == 0) return 1.0;
  const auto top = C.topRows(static_cast<Eigen::Index>(N));
  const Eigen::MatrixXcd tail =
      Eigen::MatrixXcd::Identity(M, M) - top.adjoint() * top;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(tail, Eigen::EigenvaluesOnly);
  const double lambda = eig.eigenvalues().maxCoeff();
  return std::sqrt(std::clamp(lambda, 0.0, 1.0));
}

double BalancingNorm(const SubspaceBasis& basis, const FreqOrdering& ordering,
                     std::size_t N) {
  return BalancingNormFromMatrix(FourierMatrix(basis, ordering, N), N);
}

std::size_t ChooseN(const SubspaceBasis& basis, OrderingKind kind,
                    double threshold, std::size_t N_max) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw InvalidArgument("threshold must lie in (0, 1]");
  }
  if (N_max < 1) throw InvalidArgument("N_max must be >= 1");
  const FreqOrdering ordering = MakeOrdering(kind, basis.dim(), N_max);
  const Eigen::MatrixXcd C = FourierMatrix(basis, ordering, N_max);
  const double at_max = BalancingNormFromMatrix(C, N_max);
  if (at_max > threshold) {
    std::ostringstream msg;
    msg << "no N <= " << N_max << " reaches balancing norm " << threshold
        << " (norm at N_max = " << at_max << ")";
    throw NotFoundError(msg.str(), at_max);
  }
  // Invariant: norm(lo) > threshold (norm(0) = 1), norm(hi) <= threshold.
  std::size_t lo = 0, hi = N_max;
  if (threshold >= 1.0) return 1;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (BalancingNormFromMatrix(C, mid) <= threshold) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace cgoinv
