// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "cgoinv/errors.h"
#include "cgoinv/kernels.h"
#include "cgoinv/recon.h"
#include "common/seeds.h"

namespace cgoinv {
namespace {

double Distance(std::span<const Complex> a, std::span<const Complex> b) {
  return std::sqrt(kernels::DistanceSquared(a, b));
}

void WriteOptional(std::ostream& out, const std::optional<double>& v) {
  if (v) out << *v;
}

}  // namespace

void ReconConfig::Validate() const {
  if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  if (!(stop_tol > 0.0)) throw InvalidArgument("stop_tol must be > 0");
  if (!(projection_tol > 0.0)) throw InvalidArgument("projection_tol must be > 0");
}

bool IterationLog::EnvelopeHolds(double rate, double constant) const {
  if (!first_step) return false;
  bool any = false;
  for (const IterationRecord& r : records) {
    if (!r.true_error) continue;
    any = true;
    if (*r.true_error > constant * std::pow(rate, r.n) * *first_step) return false;
  }
  return any;
}

void IterationLog::WriteCsv(std::ostream& out) const {
  out << "n,step_norm,true_error,data_residual\n";
  out.precision(17);
  for (const IterationRecord& r : records) {
    out << r.n << ',';
    WriteOptional(out, r.step_norm);
    out << ',';
    WriteOptional(out, r.true_error);
    out << ',';
    WriteOptional(out, r.data_residual);
    out << '\n';
  }
}

void CheckProvenance(const MeasurementVector& y, const MeasurementOperator& op) {
  std::ostringstream why;
  if (y.N != op.N()) why << " N " << y.N << " vs " << op.N() << ';';
  if (y.ordering != op.ordering()) why << " ordering;";
  if (y.schedule.s != op.schedule().s || y.schedule.tau != op.schedule().tau) {
    why << " schedule;";
  }
  const SolverConfig& a = y.solver;
  const SolverConfig& b = op.config();
  if (a.method != b.method || a.tol != b.tol || a.max_iter != b.max_iter ||
      a.restart != b.restart || a.resonance_delta != b.resonance_delta ||
      a.nudge_factor != b.nudge_factor || a.max_nudges != b.max_nudges) {
    why << " solver;";
  }
  if (y.grid_n != 0 && y.grid_n != op.basis().grid().n()) why << " grid;";
  if (y.values.size() != y.N) why << " value count;";
  if (!why.str().empty()) {
    throw ProvenanceError("measurement provenance does not match the configuration:" +
                          why.str());
  }
}

Reconstructor::Reconstructor(const MeasurementOperator& op, const BoxConstraint& box,
                             const ReconConfig& config)
    : op_(op), box_(box), config_(config) {
  config_.Validate();
}

std::vector<Complex> Reconstructor::Project(std::span<const Complex> a) const {
  return ProjectBoxCoefficients(a, op_.basis(), box_, config_.projection_tol);
}

std::vector<Complex> Reconstructor::ApplyA(std::span<const Complex> a,
                                           std::span<const Complex> y,
                                           double* residual) const {
  if (y.size() != op_.N()) throw DimensionError("measurement length != N");
  std::vector<Complex> f, b;
  op_.FB(a, &f, &b);
  Eigen::VectorXcd mismatch(static_cast<Eigen::Index>(y.size()));
  for (std::size_t l = 0; l < y.size(); ++l) mismatch[l] = y[l] - f[l] - b[l];
  if (residual != nullptr) *residual = mismatch.norm();
  const Eigen::VectorXcd step = op_.fourier_matrix().adjoint() * mismatch;
  std::vector<Complex> c(a.begin(), a.end());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += step[i];
  return Project(c);
}

Field Reconstructor::ApplyA(const Field& q, const MeasurementVector& y) const {
  CheckProvenance(y, op_);
  const std::vector<Complex> a = Project(op_.basis().Analyze(q));
  return op_.basis().Synthesize(ApplyA(a, y.values));
}

ReconResult Reconstructor::Reconstruct(std::span<const Complex> y,
                                       std::span<const Complex> a0,
                                       const std::vector<Complex>* truth) const {
  ReconResult result;
  std::vector<Complex> a = Project(a0);
  std::optional<double> step;
  for (int n = 0;; ++n) {
    double residual = 0.0;
    std::vector<Complex> next = ApplyA(a, y, &residual);
    IterationRecord rec;
    rec.n = n;
    rec.step_norm = step;
    if (truth != nullptr) rec.true_error = Distance(*truth, a);
    rec.data_residual = residual;
    result.log.records.push_back(rec);
    const double next_step = Distance(next, a);
    if (n == 0) result.log.first_step = next_step;
    if (next_step <= config_.stop_tol) {
      result.converged = true;
      result.iterations = n;
      result.coefficients = std::move(a);
      break;
    }
    if (n + 1 == config_.max_iter) {
      IterationRecord last;
      last.n = n + 1;
      last.step_norm = next_step;
      if (truth != nullptr) last.true_error = Distance(*truth, next);
      result.log.records.push_back(last);
      result.iterations = n + 1;
      result.coefficients = std::move(next);
      break;
    }
    step = next_step;
    a = std::move(next);
  }
  result.log.converged = result.converged;
  return result;
}

ReconResult Reconstructor::Reconstruct(const MeasurementVector& y,
                                       std::span<const Complex> a0,
                                       const std::vector<Complex>* truth) const {
  CheckProvenance(y, op_);
  return Reconstruct(std::span<const Complex>(y.values), a0, truth);
}

PerturbationReport PerturbationExperiment(const Reconstructor& recon,
                                          std::span<const Complex> truth,
                                          std::span<const Complex> clean_y,
                                          double noise_level, std::uint64_t seed,
                                          double tolerance) {
  if (!(noise_level >= 0.0)) throw InvalidArgument("noise level must be >= 0");
  std::vector<Complex> y(clean_y.begin(), clean_y.end());
  std::mt19937_64 rng(internal::DeriveSeed(seed, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Complex> delta(y.size());
  for (Complex& d : delta) d = Complex(normal(rng), normal(rng));
  const double norm = std::sqrt(kernels::NormSquared(delta));
  for (std::size_t l = 0; l < y.size(); ++l) {
    delta[l] *= norm > 0.0 ? noise_level / norm : 0.0;
    y[l] += delta[l];
  }
  const std::vector<Complex> zero(truth.size(), 0.0);
  const ReconResult result = recon.Reconstruct(std::span<const Complex>(y), zero);
  PerturbationReport report;
  report.noise_level = noise_level;
  report.delta_norm = std::sqrt(kernels::NormSquared(delta));
  report.error = Distance(result.coefficients, truth);
  report.bound = 4.0 * report.delta_norm + tolerance;
  report.converged = result.converged;
  return report;
}

Field LiouvillePotential(const Field& sigma) {
  double sup = 0.0;
  for (const Complex& v : sigma.values) sup = std::max(sup, std::abs(v));
  if (MaxImagAbs(sigma) > 1e-12 * std::max(sup, 1.0)) {
    throw PositivityError("conductivity must be real");
  }
  Field root(sigma.grid);
  for (std::size_t i = 0; i < sigma.values.size(); ++i) {
    const double s = sigma.values[i].real();
    if (!(s > 0.0)) throw PositivityError("conductivity must be positive at every node");
    root.values[i] = std::sqrt(s);
  }
  Field q = Laplacian(root);
  for (std::size_t i = 0; i < q.values.size(); ++i) {
    q.values[i] = q.values[i].real() / root.values[i].real();
  }
  return q;
}

}  // namespace cgoinv
