// SPDX-License-Identifier: Apache-2.0
#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "cgoinv/cgo.h"
#include "cgoinv/errors.h"
#include "cgoinv/kernels.h"

namespace cgoinv {
namespace {

constexpr double kPi = std::numbers::pi;

double Norm(std::span<const Complex> v) { return std::sqrt(kernels::NormSquared(v)); }

void Scale(double s, std::span<Complex> v) {
  for (Complex& c : v) c *= s;
}

// Calls fn(index, m, sigma(m), grounded) for every frequency of the grid
// box in storage order. sigma and the integer part of the grounding test
// are additive over axes, so both come from per-axis tables.
template <typename Fn>
void ForEachSymbol(const ComplexFrequency& z, const TorusGrid& grid, Fn&& fn) {
  const int d = grid.dim();
  const int n = grid.n();
  if (static_cast<int>(z.k.size()) != d) {
    throw DimensionError("frequency and grid dimensions differ");
  }
  // sigma(m) = sum_a (-4 pi^2 m_a^2 + 4 pi i zeta_a m_a).
  std::vector<Complex> sig(static_cast<std::size_t>(d) * n);
  std::vector<std::int64_t> gap(static_cast<std::size_t>(d) * n);
  std::vector<int> freq(n);
  for (int s = 0; s < n; ++s) freq[s] = s <= n / 2 ? s : s - n;
  for (int a = 0; a < d; ++a) {
    for (int s = 0; s < n; ++s) {
      const double m = freq[s];
      sig[a * n + s] = -4.0 * kPi * kPi * m * m + Complex(0.0, 4.0 * kPi) * z.zeta1[a] * m;
      gap[a * n + s] = static_cast<std::int64_t>(freq[s]) * (freq[s] - z.k[a]);
    }
  }
  std::vector<int> slot(d, 0), m(d, 0);
  // Prefix sums over the slower axes; axis d-1 varies fastest.
  std::vector<Complex> sig_prefix(d + 1, 0.0);
  std::vector<std::int64_t> gap_prefix(d + 1, 0);
  auto refresh = [&](int from) {
    for (int a = from; a < d; ++a) {
      sig_prefix[a + 1] = sig_prefix[a] + sig[a * n + slot[a]];
      gap_prefix[a + 1] = gap_prefix[a] + gap[a * n + slot[a]];
      m[a] = freq[slot[a]];
    }
  };
  refresh(0);
  const int last = d - 1;
  for (std::size_t i = 0; i < grid.size();) {
    const Complex base = sig_prefix[last];
    const std::int64_t gbase = gap_prefix[last];
    for (int s = 0; s < n; ++s, ++i) {
      m[last] = freq[s];
      // |m|^2 = k.m is necessary for grounding; the real-frame test is rare.
      const bool grounded =
          gbase + gap[last * n + s] == 0 && IsGrounded(z, m);
      fn(i, base + sig[last * n + s], grounded);
    }
    int a = last - 1;
    while (a >= 0 && ++slot[a] == n) slot[a--] = 0;
    if (a < 0) break;
    refresh(a);
  }
}

}  // namespace

RemainderSolver::RemainderSolver(const Field& q, const SolverConfig& config)
    : config_(config), q_(q), qhat_(ForwardTransform(q)) {
  config_.Validate();
  zero_potential_ = kernels::NormSquared(qhat_.coeffs) == 0.0;
  const std::size_t size = q.grid.size();
  const double scale = 1.0 / static_cast<double>(size);
  scaled_q_.resize(size);
  for (std::size_t i = 0; i < size; ++i) scaled_q_[i] = q.values[i] * scale;
  sigma_.resize(size);
  inverse_.resize(size);
  grounded_.resize(size);
  work_.resize(size);
  work2_.resize(size);
  x_.resize(size);
}

void RemainderSolver::BuildSymbol(const ComplexFrequency& z) {
  ForEachSymbol(z, q_.grid, [&](std::size_t i, Complex sigma, bool grounded) {
    sigma_[i] = sigma;
    grounded_[i] = grounded ? 1 : 0;
    const double s2 = sigma.real() * sigma.real() + sigma.imag() * sigma.imag();
    inverse_[i] = grounded ? Complex(0.0) : Complex(sigma.real() / s2, -sigma.imag() / s2);
  });
}

// out = F(q F^{-1}(g z)); out may alias z.
void RemainderSolver::Coupling(std::span<const Complex> z, std::span<Complex> out) {
  kernels::Multiply(inverse_, z, work_);
  InverseFft(q_.grid, work_, work2_);
  kernels::Multiply(scaled_q_, work2_, work2_);
  ForwardFftUnscaled(q_.grid, work2_, out);
}

// r and rhat describe the same field.
// l^2 norm of sigma rhat - (q r)^ - qhat over the non-grounded frequencies.
double RemainderSolver::TrueResidual(std::span<const Complex> r,
                                     std::span<const Complex> rhat) {
  kernels::Multiply(scaled_q_, r, work_);
  ForwardFftUnscaled(q_.grid, work_, work2_);
  double acc = 0.0;
  for (std::size_t i = 0; i < work2_.size(); ++i) {
    if (grounded_[i]) continue;
    acc += std::norm(sigma_[i] * rhat[i] - work2_[i] - qhat_.coeffs[i]);
  }
  return std::sqrt(acc);
}

// Restarted GMRES for (I - K) x = qhat, from x = 0 when total == 0 and from
// the given x otherwise; returns the running number of operator applications. The Arnoldi process runs on K, whose Krylov
// spaces are those of I - K, and the Hessenberg matrix is shifted.
int RemainderSolver::Gmres(std::span<Complex> x, int total) {
  const std::span<const Complex> b = qhat_.coeffs;
  const std::size_t n = b.size();
  const int m = config_.restart;
  std::vector<Complex> h(static_cast<std::size_t>(m + 1) * m);
  std::vector<Complex> cs(m), sn(m), gvec(m + 1), y(m);
  auto H = [&](int i, int j) -> Complex& { return h[static_cast<std::size_t>(i) * m + j]; };
  while (static_cast<int>(basis_.size()) <= m) basis_.emplace_back(n);

  if (total == 0) std::fill(x.begin(), x.end(), 0.0);
  while (true) {
    std::vector<Complex>& v0 = basis_[0];
    if (total == 0) {
      std::copy(b.begin(), b.end(), v0.begin());
    } else {
      Coupling(x, v0);
      for (std::size_t i = 0; i < n; ++i) v0[i] += b[i] - x[i];
    }
    const double beta = Norm(v0);
    if (beta <= config_.tol) return total;
    if (total >= config_.max_iter) {
      throw IterationCapError("Krylov remainder solve hit the iteration cap");
    }
    Scale(1.0 / beta, v0);
    std::fill(gvec.begin(), gvec.end(), 0.0);
    gvec[0] = beta;

    bool converged = false;
    int j = 0;
    for (; j < m && total < config_.max_iter; ++j) {
      std::vector<Complex>& w = basis_[j + 1];
      Coupling(basis_[j], w);
      ++total;
      for (int i = 0; i <= j; ++i) {
        const Complex hij = kernels::DotConj(basis_[i], w);
        kernels::Axpy(-hij, basis_[i], w);
        H(i, j) = (i == j ? 1.0 : 0.0) - hij;
      }
      const double hn = Norm(w);
      H(j + 1, j) = -hn;
      if (hn > 0.0) Scale(1.0 / hn, w);
      for (int i = 0; i < j; ++i) {
        const Complex a = H(i, j), c = H(i + 1, j);
        H(i, j) = std::conj(cs[i]) * a + std::conj(sn[i]) * c;
        H(i + 1, j) = -sn[i] * a + cs[i] * c;
      }
      const Complex a = H(j, j), c = H(j + 1, j);
      const double denom = std::sqrt(std::norm(a) + std::norm(c));
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = a / denom;
        sn[j] = c / denom;
      }
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      gvec[j + 1] = -sn[j] * gvec[j];
      gvec[j] = std::conj(cs[j]) * gvec[j];
      if (std::abs(gvec[j + 1]) <= 0.5 * config_.tol || hn == 0.0) {
        converged = true;
        ++j;
        break;
      }
    }
    for (int i = j - 1; i >= 0; --i) {
      Complex s = gvec[i];
      for (int l = i + 1; l < j; ++l) s -= H(i, l) * y[l];
      y[i] = s / H(i, i);
    }
    for (int i = 0; i < j; ++i) kernels::Axpy(y[i], basis_[i], x);
    // The caller recomputes the true residual, which is bounded by the
    // Krylov one, so an estimated convergence ends the solve.
    if (converged) return total;
  }
}

// x_{j+1} = qhat + K x_j from x_0 = 0.
int RemainderSolver::Neumann(std::span<Complex> x) {
  const std::span<const Complex> b = qhat_.coeffs;
  const std::size_t n = b.size();
  std::vector<Complex> next(n);
  std::fill(x.begin(), x.end(), 0.0);
  double previous = std::numeric_limits<double>::infinity();
  int growth = 0;
  for (int it = 1; it <= config_.max_iter; ++it) {
    Coupling(x, next);
    for (std::size_t i = 0; i < n; ++i) next[i] += b[i];
    const double step = std::sqrt(kernels::DistanceSquared(next, x));
    std::copy(next.begin(), next.end(), x.begin());
    if (step <= config_.tol) return it;
    growth = step > previous ? growth + 1 : 0;
    if (growth >= 5) {
      throw SolverDivergenceError(
          "Neumann series diverges (t too small for this potential)");
    }
    previous = step;
  }
  throw IterationCapError("Neumann remainder solve hit the iteration cap");
}

RemainderSolution RemainderSolver::Solve(const ComplexFrequency& z, Spectrum* rhat_out) {
  const TorusGrid& g = q_.grid;
  RemainderSolution sol{Field(g), 0.0, 0, z.t_nominal, z.t, config_.method, z.k};
  std::optional<Spectrum> local;
  Spectrum& rhat = rhat_out != nullptr ? *rhat_out : local.emplace(g);
  if (!(rhat.grid == g)) rhat = Spectrum(g);
  if (zero_potential_) {
    std::fill(rhat.coeffs.begin(), rhat.coeffs.end(), 0.0);
    return sol;
  }
  BuildSymbol(z);
  const bool krylov = config_.method == SolverMethod::kKrylov;
  sol.iterations = krylov ? Gmres(x_, 0) : Neumann(x_);
  while (true) {
    kernels::Multiply(inverse_, x_, rhat.coeffs);
    InverseFft(g, rhat.coeffs, sol.r.values);
    sol.residual = TrueResidual(sol.r.values, rhat.coeffs);
    if (sol.residual <= config_.tol || !krylov || sol.iterations >= config_.max_iter) break;
    // The Krylov estimate can undershoot after rounding; resume from x.
    const int before = sol.iterations;
    sol.iterations = Gmres(x_, sol.iterations);
    if (sol.iterations == before) break;
  }
  if (!(sol.residual <= config_.tol)) {
    std::ostringstream msg;
    msg << "remainder residual " << sol.residual << " exceeds tol " << config_.tol;
    throw IterationCapError(msg.str());
  }
  return sol;
}

SymbolMinimum MinSymbol(const ComplexFrequency& z, const TorusGrid& grid) {
  double best2 = std::numeric_limits<double>::infinity();
  std::size_t where = 0;
  ForEachSymbol(z, grid, [&](std::size_t i, Complex sigma, bool grounded) {
    const double v = std::norm(sigma);
    if (!grounded && v < best2) {
      best2 = v;
      where = i;
    }
  });
  SymbolMinimum best{std::sqrt(best2), std::vector<int>(grid.dim())};
  grid.FrequencyAt(where, best.m);
  return best;
}

ComplexFrequency ResonanceGuard(const ComplexFrequency& z, const TorusGrid& grid,
                                const SolverConfig& config) {
  ComplexFrequency current = z;
  for (int nudge = 0;; ++nudge) {
    const SymbolMinimum min = MinSymbol(current, grid);
    if (min.value > 0.0 && min.value >= config.resonance_delta * current.t) {
      return current;
    }
    if (nudge == config.max_nudges) {
      std::ostringstream msg;
      msg << "resonance guard failed for t=" << z.t << ": |sigma(m)| = "
          << min.value << " at m=(";
      for (std::size_t a = 0; a < min.m.size(); ++a) msg << (a ? "," : "") << min.m[a];
      msg << ")";
      throw ResonanceGuardError(msg.str());
    }
    current = MakeZeta(z.k, current.t * config.nudge_factor);
    current.t_nominal = z.t_nominal;
  }
}

RemainderSolution SolveRemainderSpectral(const Field& q, const ComplexFrequency& z,
                                         const SolverConfig& config,
                                         Spectrum& rhat) {
  RemainderSolver solver(q, config);
  return solver.Solve(z, &rhat);
}

RemainderSolution SolveRemainder(const Field& q, const ComplexFrequency& z,
                                 const SolverConfig& config) {
  RemainderSolver solver(q, config);
  return solver.Solve(z);
}

std::vector<DecayPoint> RemainderDecay(const Field& q, std::span<const int> k,
                                       std::span<const double> t_list,
                                       const SolverConfig& config) {
  RemainderSolver solver(q, config);
  std::vector<DecayPoint> out;
  double last = -std::numeric_limits<double>::infinity();
  for (double t : t_list) {
    if (!(t > last)) throw InvalidArgument("t_list must be increasing");
    last = t;
    const ComplexFrequency z = ResonanceGuard(MakeZeta(k, t), q.grid, config);
    const RemainderSolution sol = solver.Solve(z);
    out.push_back({t, z.t, L2Norm(sol.r)});
  }
  return out;
}

void WriteRemainderSidecar(std::ostream& out, const RemainderSolution& sol) {
  nlohmann::json j;
  j["k"] = sol.k;
  j["t_requested"] = sol.t_requested;
  j["t_used"] = sol.t_used;
  j["residual"] = sol.residual;
  j["iterations"] = sol.iterations;
  j["method"] = std::string(MethodName(sol.method));
  out << j.dump(2) << '\n';
}

}  // namespace cgoinv
