// SPDX-License-Identifier: Apache-2.0
//
// Desk-scale acceptance suite (d = 3, 16^3 grid). Each criterion reports a
// verdict, the measured values and its runtime.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cgoinv/cgo.h"
#include "cgoinv/spectral.h"

namespace cgoinv::acceptance {

struct Options {
  std::vector<int> subset;  // empty: all of 1..10
  // Multiplies the calibrated tau before it is used (negative control).
  double tau_scale = 1.0;
  int threads = 0;
  std::uint64_t seed = 1;
  std::ostream* progress = nullptr;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string measured;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

inline constexpr int kCriterionCount = 10;

std::vector<CriterionResult> Run(const Options& options);

// "PASS  3 solver-oracle  max |diff| = ... [12.3 s / 120 s]"
std::string FormatLine(const CriterionResult& result);
void WriteJsonReport(std::ostream& out, const std::vector<CriterionResult>& results);

// Independent references used by the suite and the unit tests.

// Remainder coefficients from a dense solve of the grounded Fourier-Galerkin
// system sigma(m) rhat(m) - sum_m' qhat(m - m') rhat(m') = qhat(m) over the
// non-grounded frequencies of q's grid (differences taken modulo n).
Spectrum DenseRemainder(const Field& q, const ComplexFrequency& z);

// sqrt(lambda_max) of the tail Gram matrix of the two-cell partition
// {x_1 < 1/2}, {x_1 >= 1/2} under the hyperbolic ordering: direct sum over
// l in (N, cutoff] plus the remaining axis frequencies summed analytically.
double TwoCellTailNorm(std::size_t N, std::size_t cutoff = 1000000);

// Least-squares slope of log y against log x.
double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cgoinv::acceptance
