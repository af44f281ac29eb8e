// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <sstream>

#include "cgoinv/errors.h"
#include "cgoinv/kernels.h"
#include "cgoinv/transform.h"
#include "common/seeds.h"

namespace cgoinv {

void RandomPairs(const SubspaceBasis& basis, const BoxConstraint& box,
                 int count, std::uint64_t seed,
                 std::vector<std::vector<Complex>>* first,
                 std::vector<std::vector<Complex>>* second) {
  first->clear();
  second->clear();
  std::uint64_t stream = 0;
  while (static_cast<int>(first->size()) < count) {
    std::vector<Complex> a = RandomCoefficients(basis, box, internal::DeriveSeed(seed, stream++));
    std::vector<Complex> b = RandomCoefficients(basis, box, internal::DeriveSeed(seed, stream++));
    if (kernels::DistanceSquared(a, b) == 0.0) continue;
    first->push_back(std::move(a));
    second->push_back(std::move(b));
  }
}

double ContractionRatio(const MeasurementOperator& op,
                        std::span<const std::vector<Complex>> first,
                        std::span<const std::vector<Complex>> second) {
  if (first.size() != second.size()) throw InvalidArgument("pair lists differ in length");
  double worst = 0.0;
  for (std::size_t p = 0; p < first.size(); ++p) {
    const std::vector<Complex> b1 = op.B(first[p]);
    const std::vector<Complex> b2 = op.B(second[p]);
    // The basis is orthonormal, so coefficient distance is the L^2 distance.
    const double dq = std::sqrt(kernels::DistanceSquared(first[p], second[p]));
    const double db = std::sqrt(kernels::DistanceSquared(b1, b2));
    worst = std::max(worst, db / dq);
  }
  return worst;
}

namespace {

// Evaluates B along the pool and stops once some pair exceeds target.
CalibrationStep ProbeStep(const MeasurementOperator& op,
                          const std::vector<std::vector<Complex>>& pool,
                          double tau, double target) {
  CalibrationStep step{tau, 0.0, 0};
  std::vector<std::vector<Complex>> values;
  values.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    values.push_back(op.B(pool[i]));
    ++step.evaluations;
    for (std::size_t j = 0; j < i; ++j) {
      const double dq = std::sqrt(kernels::DistanceSquared(pool[i], pool[j]));
      if (dq == 0.0) continue;
      const double db = std::sqrt(kernels::DistanceSquared(values[i], values[j]));
      step.ratio = std::max(step.ratio, db / dq);
    }
    if (step.ratio > target) break;
  }
  return step;
}

}  // namespace

CalibrationResult CalibrateTau(const SubspaceBasis& basis,
                               const BoxConstraint& box,
                               const FreqOrdering& ordering,
                               const TSchedule& schedule0,
                               const SolverConfig& config, std::size_t N,
                               const CalibrationOptions& options) {
  if (options.probes < 10) throw InvalidArgument("calibration needs >= 10 probes");
  if (!(options.margin >= 0.0 && options.margin < 0.5)) {
    throw InvalidArgument("calibration margin must lie in [0, 1/2)");
  }
  if (!(options.tau0 > 0.0)) throw InvalidArgument("tau0 must be > 0");
  std::vector<std::vector<Complex>> first, second;
  RandomPairs(basis, box, options.probes, options.seed, &first, &second);
  std::vector<std::vector<Complex>> pool;
  for (std::size_t p = 0; p < first.size(); ++p) {
    pool.push_back(std::move(first[p]));
    pool.push_back(std::move(second[p]));
  }

  const double target = 0.5 - options.margin;
  CalibrationResult result{schedule0, 0.0, {}};
  TSchedule schedule = schedule0;
  for (int j = 0; j <= options.max_doublings; ++j) {
    schedule.tau = options.tau0 * std::ldexp(1.0, j);
    const MeasurementOperator op(basis, ordering, schedule, config, N, options.threads);
    const CalibrationStep step = ProbeStep(op, pool, schedule.tau, target);
    result.history.push_back(step);
    if (step.ratio <= target) {
      result.schedule = schedule;
      result.ratio = step.ratio;
      return result;
    }
  }
  std::ostringstream msg;
  msg << "contraction ratio " << result.history.back().ratio << " still above " << target
      << " after " << options.max_doublings << " doublings of tau";
  throw CalibrationError(msg.str());
}

}  // namespace cgoinv
