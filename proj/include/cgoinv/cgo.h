// SPDX-License-Identifier: Apache-2.0
//
// Complex frequencies zeta_1, zeta_2 and the periodic remainder equation
//
//   Delta r + 2 zeta.grad r - q r = q   on T^d,
//
// obtained from psi = e^{zeta.x} (1 + r) with zeta.zeta = 0. In Fourier
// variables the constant-coefficient part is the multiplier
// sigma(m) = -4 pi^2 |m|^2 + 4 pi i zeta.m.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cgoinv/spectral.h"

namespace cgoinv {

struct ComplexFrequency {
  std::vector<int> k;
  double t = 0.0;
  double t_nominal = 0.0;  // t before any resonance nudge
  std::vector<double> xi;
  std::vector<double> eta;
  std::vector<Complex> zeta1;
  std::vector<Complex> zeta2;
};

// Unit xi, eta with xi.eta = xi.k = eta.k = 0. k = 0 gives (e_1, e_2);
// otherwise Gram-Schmidt of the first two canonical vectors that are
// independent of k (together with k).
std::pair<std::vector<double>, std::vector<double>> MakeFrame(
    std::span<const int> k);

// zeta_1 = -i(pi k + t xi) + sqrt(t^2 + pi^2 |k|^2) eta,
// zeta_2 = -i(pi k - t xi) - sqrt(t^2 + pi^2 |k|^2) eta.
ComplexFrequency MakeZeta(std::span<const int> k, double t);

Complex FaddeevSymbol(std::span<const int> m, std::span<const Complex> zeta);

// Frequencies where sigma vanishes for every t and which the solver
// therefore grounds: m = 0 and the m != 0 with |m|^2 = k.m, xi.m = eta.m = 0
// (for d = 3 this is exactly {0, k}).
bool IsGrounded(const ComplexFrequency& z, std::span<const int> m);

enum class SolverMethod { kNeumann, kKrylov };

std::string_view MethodName(SolverMethod method);
SolverMethod ParseMethod(std::string_view name);

struct SolverConfig {
  SolverMethod method = SolverMethod::kKrylov;
  double tol = 1e-10;
  int max_iter = 500;
  int restart = 30;
  double resonance_delta = 1e-6;  // relative to t
  double nudge_factor = 1.0 + 1e-4;
  int max_nudges = 20;

  void Validate() const;
};

struct SymbolMinimum {
  double value;
  std::vector<int> m;
};

// min |sigma(m)| over the non-grounded frequencies of the grid box.
SymbolMinimum MinSymbol(const ComplexFrequency& z, const TorusGrid& grid);

// Multiplies t by nudge_factor until MinSymbol >= resonance_delta * t;
// throws ResonanceGuardError (naming the offending m) after max_nudges.
ComplexFrequency ResonanceGuard(const ComplexFrequency& z,
                                const TorusGrid& grid,
                                const SolverConfig& config);

struct RemainderSolution {
  Field r;
  double residual = 0.0;
  int iterations = 0;
  double t_requested = 0.0;
  double t_used = 0.0;
  SolverMethod method = SolverMethod::kKrylov;
  std::vector<int> k;
};

// Solver bound to one potential q: caches qhat and the work buffers so
// that many frequencies can be solved against the same q. One instance per
// thread.
class RemainderSolver {
 public:
  RemainderSolver(const Field& q, const SolverConfig& config);

  // See SolveRemainder. When rhat is given it receives the coefficients
  // of r.
  RemainderSolution Solve(const ComplexFrequency& z, Spectrum* rhat = nullptr);

  const Field& potential() const { return q_; }

 private:
  void BuildSymbol(const ComplexFrequency& z);
  void Coupling(std::span<const Complex> z, std::span<Complex> out);
  double TrueResidual(std::span<const Complex> r, std::span<const Complex> rhat);
  int Gmres(std::span<Complex> x, int total);
  int Neumann(std::span<Complex> x);

  SolverConfig config_;
  Field q_;
  std::vector<Complex> scaled_q_;  // q / n^d
  Spectrum qhat_;
  bool zero_potential_;
  std::vector<Complex> sigma_;
  std::vector<Complex> inverse_;
  std::vector<std::uint8_t> grounded_;
  std::vector<Complex> work_, work2_, x_;
  std::vector<std::vector<Complex>> basis_;
};

// Solves for r on q's grid with the grounded inverse symbol. The residual
// is the l^2 norm over the non-grounded m of
// sigma(m) rhat(m) - (q r)^(m) - qhat(m), always recomputed from the
// returned r. Throws SolverDivergenceError (Neumann residual grew five
// times in a row) and IterationCapError.
RemainderSolution SolveRemainder(const Field& q, const ComplexFrequency& z,
                                 const SolverConfig& config);

// The same via the frequency box, for callers that keep r in Fourier form.
// On return rhat holds the coefficients of r.
RemainderSolution SolveRemainderSpectral(const Field& q,
                                         const ComplexFrequency& z,
                                         const SolverConfig& config,
                                         Spectrum& rhat);

struct DecayPoint {
  double t_requested;
  double t_used;
  double norm;
};

// ||r^{k,t}||_{L^2} for each t (after the guard).
std::vector<DecayPoint> RemainderDecay(const Field& q, std::span<const int> k,
                                       std::span<const double> t_list,
                                       const SolverConfig& config);

// JSON sidecar {k, t_requested, t_used, residual, iterations, method}.
void WriteRemainderSidecar(std::ostream& out, const RemainderSolution& sol);

}  // namespace cgoinv
