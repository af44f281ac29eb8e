// SPDX-License-Identifier: Apache-2.0
//
// Fixed-point reconstruction q_{n+1} = A(q_n) with
//
//   A(q) = P_{W_R}(F^{-1} y + F^{-1} P_N^perp F q - F^{-1} P_N B(q)).
//
// W_R is a subset of W, so P_{W_R} = P_{W_R} P_W and A is evaluated on
// coefficient vectors: with C_li = hat{w}_i(k_l) and a the coefficients of q,
//
//   A(a) = P_{W_R}(a + C^H (y - C a - B(a))).
#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cgoinv/subspaces.h"
#include "cgoinv/transform.h"

namespace cgoinv {

struct ReconConfig {
  int max_iter = 60;
  double stop_tol = 1e-10;  // on ||q_{n+1} - q_n||_{L^2}
  double projection_tol = 1e-12;

  void Validate() const;
};

struct IterationRecord {
  int n = 0;
  std::optional<double> step_norm;   // ||q_n - q_{n-1}||, absent for n = 0
  std::optional<double> true_error;  // ||q* - q_n|| when the truth is known
  std::optional<double> data_residual;  // ||P_N U(q_n) - y||
};

struct IterationLog {
  std::vector<IterationRecord> records;
  bool converged = false;
  std::optional<double> first_step;  // ||q_1 - q_0||

  // ||q* - q_n|| <= constant rate^n ||q_1 - q_0|| for every logged n with a
  // known error. False when no error is logged.
  bool EnvelopeHolds(double rate = 0.75, double constant = 4.0) const;
  // CSV n,step_norm,true_error,data_residual; unknown entries are blank.
  void WriteCsv(std::ostream& out) const;
};

struct ReconResult {
  std::vector<Complex> coefficients;
  IterationLog log;
  bool converged = false;
  int iterations = 0;  // index n of the returned iterate
};

// Throws ProvenanceError unless y was produced with the operator's N,
// ordering, schedule, solver settings and grid.
void CheckProvenance(const MeasurementVector& y, const MeasurementOperator& op);

class Reconstructor {
 public:
  Reconstructor(const MeasurementOperator& op, const BoxConstraint& box,
                const ReconConfig& config);

  const MeasurementOperator& op() const { return op_; }

  // A on coefficients of an element of W_R. residual, when given, receives
  // ||C a + B(a) - y||.
  std::vector<Complex> ApplyA(std::span<const Complex> a, std::span<const Complex> y,
                              double* residual = nullptr) const;
  // The same for a grid field, projected onto W_R first.
  Field ApplyA(const Field& q, const MeasurementVector& y) const;

  // Iterates from a0 (projected onto W_R) until ||A(q_n) - q_n|| <= stop_tol
  // and returns that q_n; otherwise stops after max_iter applications with
  // converged = false and the last iterate.
  ReconResult Reconstruct(std::span<const Complex> y, std::span<const Complex> a0,
                          const std::vector<Complex>* truth = nullptr) const;
  ReconResult Reconstruct(const MeasurementVector& y, std::span<const Complex> a0,
                          const std::vector<Complex>* truth = nullptr) const;

  std::vector<Complex> Project(std::span<const Complex> a) const;

 private:
  const MeasurementOperator& op_;
  BoxConstraint box_;
  ReconConfig config_;
};

struct PerturbationReport {
  double noise_level;
  double delta_norm;
  double error;  // ||q~ - q*||_{L^2}
  double bound;  // 4 ||delta|| + tolerance
  bool converged;
};

// Reconstructs from y + delta with ||delta||_{l^2} = noise_level in a random
// complex Gaussian direction, starting from q0 = 0. clean_y = P_N U(truth).
PerturbationReport PerturbationExperiment(const Reconstructor& recon,
                                          std::span<const Complex> truth,
                                          std::span<const Complex> clean_y,
                                          double noise_level, std::uint64_t seed,
                                          double tolerance = 1e-8);

// q = Delta sqrt(sigma) / sqrt(sigma) with the spectral Laplacian. Throws
// PositivityError unless sigma is real with positive node values.
Field LiouvillePotential(const Field& sigma);

}  // namespace cgoinv
