// SPDX-License-Identifier: Apache-2.0
//
// Measurement operators on W. For q = sum_i c_i w_i and the ordered
// frequencies k_1, k_2, ...
//
//   F(q)_l = q^(k_l),
//   B(q)_l = integral of q(x) e^{-2 pi i k_l.x} r_l(x) dx,
//   U(q)_l = integral of q(x) e^{zeta_2.x} psi_l(x) dx = F(q)_l + B(q)_l,
//
// with psi_l = e^{zeta_1.x}(1 + r_l) the CGO solution at (k_l, t(k_l)).
// Every integral is evaluated in closed form against the trigonometric
// interpolant of r_l, so F is exact for frequencies far outside the grid
// box and U = F + B holds to round-off.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cgoinv/cgo.h"
#include "cgoinv/spectral.h"
#include "cgoinv/subspaces.h"

namespace cgoinv {

struct TSchedule {
  double s = 3.0;
  double tau = 1.0;
  // Integrability exponent; metadata for the gamma_s diagnostic.
  double p = 7.0;

  // t(k) = tau (|k|^s + 1).
  double T(std::span<const int> k) const;
  // Requires tau > 0, s > d/2 and p > 2sd / (2s - d), i.e.
  // s > dp / (2(p - d)).
  void Validate(int dim) const;

  static TSchedule Default(int dim);
};

struct MeasurementVector {
  std::size_t N = 0;
  OrderingKind ordering = OrderingKind::kHyperbolic;
  TSchedule schedule;
  SolverConfig solver;
  int grid_n = 0;
  std::vector<Complex> values;
};

void WriteMeasurement(std::ostream& out, const MeasurementVector& y);
// Throws SchemaError on malformed input.
MeasurementVector ReadMeasurement(std::istream& in);
void WriteMeasurementFile(const std::string& path, const MeasurementVector& y);
MeasurementVector ReadMeasurementFile(const std::string& path);

// The first N measurements of a basis with a grid. Resonance-guarded
// frequencies and the N x M matrix C_li = hat{w}_i(k_l) are computed once.
class MeasurementOperator {
 public:
  MeasurementOperator(const SubspaceBasis& basis, const FreqOrdering& ordering,
                      const TSchedule& schedule, const SolverConfig& config,
                      std::size_t N, int threads = 0);

  std::size_t N() const { return frequencies_.size(); }
  const SubspaceBasis& basis() const { return basis_; }
  const TSchedule& schedule() const { return schedule_; }
  const SolverConfig& config() const { return config_; }
  OrderingKind ordering() const { return ordering_; }
  const ComplexFrequency& frequency(std::size_t l0) const { return frequencies_[l0]; }
  const Eigen::MatrixXcd& fourier_matrix() const { return C_; }
  void set_threads(int threads) { threads_ = threads; }

  // Coefficients c of q in W.
  std::vector<Complex> F(std::span<const Complex> c) const;
  std::vector<Complex> B(std::span<const Complex> c) const;
  std::vector<Complex> U(std::span<const Complex> c) const;
  // Both parts of U.
  void FB(std::span<const Complex> c, std::vector<Complex>* f,
          std::vector<Complex>* b) const;
  // U from the integrand q e^{zeta_2.x} psi directly.
  std::vector<Complex> UDirect(std::span<const Complex> c) const;

  MeasurementVector Measure(std::span<const Complex> c) const;

 private:
  // Calls body(l0, rhat) for each l with the remainder spectrum of q.
  template <typename Body>
  void ForEachRemainder(std::span<const Complex> c, Body&& body) const;

  const SubspaceBasis& basis_;
  OrderingKind ordering_;
  TSchedule schedule_;
  SolverConfig config_;
  int threads_;
  std::vector<ComplexFrequency> frequencies_;
  Eigen::MatrixXcd C_;
};

// Coefficients of a grid field that must lie in W: throws InvalidArgument
// when ||q - P_W q|| > tol ||q||.
std::vector<Complex> CoefficientsInW(const Field& q, const SubspaceBasis& basis,
                                     double tol = 1e-9);

// ---------------------------------------------------------------------------
// Balancing.

// Rows hat{w}_i(k_l), l < N, from the closed-form coefficients.
Eigen::MatrixXcd FourierMatrix(const SubspaceBasis& basis,
                               const FreqOrdering& ordering, std::size_t N);

// ||P_N^perp F P_W|| = sqrt(lambda_max(I - G_N)), G_N = C_N^H C_N.
double BalancingNorm(const SubspaceBasis& basis, const FreqOrdering& ordering,
                     std::size_t N);
double BalancingNormFromMatrix(const Eigen::MatrixXcd& C, std::size_t N);

// Smallest N <= N_max with BalancingNorm <= threshold, by bisection.
// Throws NotFoundError (carrying the norm at N_max) when none exists.
std::size_t ChooseN(const SubspaceBasis& basis, OrderingKind kind,
                    double threshold, std::size_t N_max);

// ---------------------------------------------------------------------------
// Calibration.

struct CalibrationOptions {
  double tau0 = 0.1;
  double margin = 0.05;
  int probes = 10;
  int max_doublings = 20;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct CalibrationStep {
  double tau;
  // Max over the probe pairs. A rejected step stops at the first pair above
  // the target, so its ratio is a lower bound for the full max.
  double ratio;
  int evaluations;  // B evaluations spent on this tau
};

struct CalibrationResult {
  TSchedule schedule;
  double ratio;
  std::vector<CalibrationStep> history;
};

// max over pairs of ||B(q2) - B(q1)|| / ||q2 - q1||_{L^2}.
double ContractionRatio(const MeasurementOperator& op,
                        std::span<const std::vector<Complex>> first,
                        std::span<const std::vector<Complex>> second);

// Random pairs in W_R drawn from seed; pairs with ||q2 - q1|| = 0 are
// redrawn.
void RandomPairs(const SubspaceBasis& basis, const BoxConstraint& box,
                 int count, std::uint64_t seed,
                 std::vector<std::vector<Complex>>* first,
                 std::vector<std::vector<Complex>>* second);

// Smallest tau0 2^j whose probe ratio is <= 1/2 - margin. The probe set is
// the 2 * probes elements of RandomPairs(probes), and the ratio is taken over
// every pair of them: the `probes` drawn pairs plus all cross pairs, at no
// extra B evaluations. Throws CalibrationError after max_doublings doublings.
CalibrationResult CalibrateTau(const SubspaceBasis& basis,
                               const BoxConstraint& box,
                               const FreqOrdering& ordering,
                               const TSchedule& schedule0,
                               const SolverConfig& config, std::size_t N,
                               const CalibrationOptions& options);

}  // namespace cgoinv
