// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numbers>

#include "cgoinv/errors.h"
#include "cgoinv/kernels.h"
#include "cgoinv/parallel.h"
#include "cgoinv/transform.h"

namespace cgoinv {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Complex> MinusTwoPiIK(std::span<const int> k) {
  std::vector<Complex> w(k.size());
  for (std::size_t a = 0; a < k.size(); ++a) w[a] = Complex(0.0, -2.0 * kPi * k[a]);
  return w;
}

}  // namespace

Eigen::MatrixXcd FourierMatrix(const SubspaceBasis& basis,
                               const FreqOrdering& ordering, std::size_t N) {
  if (N > ordering.size()) throw InvalidArgument("ordering shorter than N");
  if (ordering.dim() != basis.dim()) throw DimensionError("ordering dimension");
  const std::size_t M = basis.size();
  Eigen::MatrixXcd C(N, M);
  std::vector<Complex> row(M);
  for (std::size_t l = 0; l < N; ++l) {
    basis.FourierRow(ordering[l], row);
    for (std::size_t i = 0; i < M; ++i) C(l, i) = row[i];
  }
  return C;
}

MeasurementOperator::MeasurementOperator(const SubspaceBasis& basis,
                                         const FreqOrdering& ordering,
                                         const TSchedule& schedule,
                                         const SolverConfig& config,
                                         std::size_t N, int threads)
    : basis_(basis),
      ordering_(ordering.kind()),
      schedule_(schedule),
      config_(config),
      threads_(threads) {
  if (!basis.has_grid()) throw InvalidArgument("measurement operator needs a grid");
  if (N < 1) throw InvalidArgument("N must be >= 1");
  schedule_.Validate(basis.dim());
  config_.Validate();
  C_ = FourierMatrix(basis, ordering, N);
  frequencies_.resize(N);
  ParallelFor(N, threads_, [&](std::size_t l) {
    const std::span<const int> k = ordering[l];
    frequencies_[l] = ResonanceGuard(MakeZeta(k, schedule_.T(k)), basis_.grid(), config_);
  });
}

template <typename Body>
void MeasurementOperator::ForEachRemainder(std::span<const Complex> c,
                                           Body&& body) const {
  if (c.size() != basis_.size()) throw DimensionError("coefficient count != dim W");
  const Field q = basis_.Synthesize(c);
  const std::size_t n = N();
  int workers = threads_ > 0 ? threads_ : DefaultThreads();
  workers = static_cast<int>(std::min<std::size_t>(std::max(workers, 1), n));
  // One solver per worker over a fixed slice of l, so the assignment of
  // work (and hence every value) is independent of scheduling.
  ParallelFor(workers, workers, [&](std::size_t w) {
    RemainderSolver solver(q, config_);
    Spectrum rhat(q.grid);
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    for (std::size_t l = begin; l < end; ++l) {
      solver.Solve(frequencies_[l], &rhat);
      body(l, rhat);
    }
  });
}

std::vector<Complex> MeasurementOperator::F(std::span<const Complex> c) const {
  if (c.size() != basis_.size()) throw DimensionError("coefficient count != dim W");
  const Eigen::Map<const Eigen::VectorXcd> cv(c.data(), static_cast<Eigen::Index>(c.size()));
  const Eigen::VectorXcd f = C_ * cv;
  return {f.data(), f.data() + f.size()};
}

std::vector<Complex> MeasurementOperator::B(std::span<const Complex> c) const {
  std::vector<Complex> b(N());
  ForEachRemainder(c, [&](std::size_t l, const Spectrum& rhat) {
    b[l] = basis_.Integrate(c, rhat, MinusTwoPiIK(frequencies_[l].k));
  });
  return b;
}

void MeasurementOperator::FB(std::span<const Complex> c, std::vector<Complex>* f,
                             std::vector<Complex>* b) const {
  *b = B(c);
  *f = F(c);
}

std::vector<Complex> MeasurementOperator::U(std::span<const Complex> c) const {
  std::vector<Complex> f, b;
  FB(c, &f, &b);
  for (std::size_t l = 0; l < f.size(); ++l) f[l] += b[l];
  return f;
}

std::vector<Complex> MeasurementOperator::UDirect(std::span<const Complex> c) const {
  std::vector<Complex> u(N());
  const std::size_t zero = 0;  // the m = 0 slot
  ForEachRemainder(c, [&](std::size_t l, const Spectrum& rhat) {
    const ComplexFrequency& z = frequencies_[l];
    std::vector<Complex> w(z.zeta1.size());
    for (std::size_t a = 0; a < w.size(); ++a) w[a] = z.zeta1[a] + z.zeta2[a];
    // 1 + r as a trigonometric polynomial.
    Spectrum g = rhat;
    g.coeffs[zero] += 1.0;
    u[l] = basis_.Integrate(c, g, w);
  });
  return u;
}

MeasurementVector MeasurementOperator::Measure(std::span<const Complex> c) const {
  MeasurementVector y;
  y.N = N();
  y.ordering = ordering_;
  y.schedule = schedule_;
  y.solver = config_;
  y.grid_n = basis_.grid().n();
  y.values = U(c);
  return y;
}

std::vector<Complex> CoefficientsInW(const Field& q, const SubspaceBasis& basis,
                                     double tol) {
  std::vector<Complex> c = basis.Analyze(q);
  const Field back = basis.Synthesize(c);
  if (L2Distance(q, back) > tol * L2Norm(q)) {
    throw InvalidArgument("potential is not an element of W");
  }
  return c;
}

}  // namespace cgoinv
