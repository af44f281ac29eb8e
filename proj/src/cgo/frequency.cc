// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <tuple>

#include "cgoinv/cgo.h"
#include "cgoinv/errors.h"

namespace cgoinv {
namespace {

constexpr double kPi = std::numbers::pi;

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void Normalize(std::vector<double>& v) {
  const double n = std::sqrt(Dot(v, v));
  for (double& x : v) x /= n;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> MakeFrame(
    std::span<const int> k) {
  const int d = static_cast<int>(k.size());
  if (d < 3) throw DimensionError("CGO frames need d >= 3");
  std::vector<double> xi(d, 0.0), eta(d, 0.0);
  bool zero = true;
  for (int v : k) zero = zero && v == 0;
  if (zero) {
    xi[0] = 1.0;
    eta[1] = 1.0;
    return {xi, eta};
  }

  // span{k, e_i, e_j} is 3-dimensional iff k has a nonzero entry outside
  // {i, j}.
  int first = -1, second = -1;
  for (int i = 0; i < d && first < 0; ++i) {
    for (int j = i + 1; j < d; ++j) {
      bool outside = false;
      for (int a = 0; a < d; ++a) outside = outside || (a != i && a != j && k[a] != 0);
      if (outside) {
        first = i;
        second = j;
        break;
      }
    }
  }
  std::vector<double> kd(k.begin(), k.end());
  const double k2 = Dot(kd, kd);
  xi[first] = 1.0;
  const double xk = Dot(xi, kd) / k2;
  for (int a = 0; a < d; ++a) xi[a] -= xk * kd[a];
  Normalize(xi);
  eta[second] = 1.0;
  const double ek = Dot(eta, kd) / k2;
  const double ex = Dot(eta, xi);
  for (int a = 0; a < d; ++a) eta[a] -= ek * kd[a] + ex * xi[a];
  Normalize(eta);
  // One re-orthogonalization pass keeps the identities at round-off level.
  const double ex2 = Dot(eta, xi);
  const double ek2 = Dot(eta, kd) / k2;
  for (int a = 0; a < d; ++a) eta[a] -= ex2 * xi[a] + ek2 * kd[a];
  Normalize(eta);
  return {xi, eta};
}

ComplexFrequency MakeZeta(std::span<const int> k, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("t must be >= 0");
  ComplexFrequency z;
  z.k.assign(k.begin(), k.end());
  z.t = t;
  z.t_nominal = t;
  std::tie(z.xi, z.eta) = MakeFrame(k);
  double k2 = 0.0;
  for (int v : k) k2 += static_cast<double>(v) * v;
  const double root = std::sqrt(t * t + kPi * kPi * k2);
  const std::size_t d = k.size();
  z.zeta1.resize(d);
  z.zeta2.resize(d);
  for (std::size_t a = 0; a < d; ++a) {
    z.zeta1[a] = Complex(root * z.eta[a], -(kPi * k[a] + t * z.xi[a]));
    z.zeta2[a] = Complex(-root * z.eta[a], -(kPi * k[a] - t * z.xi[a]));
  }
  return z;
}

Complex FaddeevSymbol(std::span<const int> m, std::span<const Complex> zeta) {
  if (m.size() != zeta.size()) throw DimensionError("symbol argument sizes");
  double m2 = 0.0;
  Complex zm = 0.0;
  for (std::size_t a = 0; a < m.size(); ++a) {
    m2 += static_cast<double>(m[a]) * m[a];
    zm += zeta[a] * static_cast<double>(m[a]);
  }
  return -4.0 * kPi * kPi * m2 + Complex(0.0, 4.0 * kPi) * zm;
}

bool IsGrounded(const ComplexFrequency& z, std::span<const int> m) {
  std::int64_t m2 = 0, km = 0;
  for (std::size_t a = 0; a < m.size(); ++a) {
    m2 += static_cast<std::int64_t>(m[a]) * m[a];
    km += static_cast<std::int64_t>(z.k[a]) * m[a];
  }
  if (m2 == 0) return true;
  if (m2 != km) return false;
  double xm = 0.0, em = 0.0;
  for (std::size_t a = 0; a < m.size(); ++a) {
    xm += z.xi[a] * m[a];
    em += z.eta[a] * m[a];
  }
  const double tol = 1e-9 * std::sqrt(static_cast<double>(m2));
  return std::abs(xm) <= tol && std::abs(em) <= tol;
}

std::string_view MethodName(SolverMethod method) {
  return method == SolverMethod::kKrylov ? "krylov" : "neumann";
}

SolverMethod ParseMethod(std::string_view name) {
  if (name == "krylov") return SolverMethod::kKrylov;
  if (name == "neumann") return SolverMethod::kNeumann;
  throw InvalidArgument("unknown solver method: " + std::string(name));
}

void SolverConfig::Validate() const {
  if (!(tol > 0.0)) throw InvalidArgument("solver tol must be > 0");
  if (max_iter < 1) throw InvalidArgument("solver max_iter must be >= 1");
  if (restart < 1) throw InvalidArgument("solver restart must be >= 1");
  if (!(resonance_delta >= 0.0)) throw InvalidArgument("resonance_delta must be >= 0");
  if (!(nudge_factor > 1.0)) throw InvalidArgument("nudge_factor must be > 1");
  if (max_nudges < 0) throw InvalidArgument("max_nudges must be >= 0");
}

}  // namespace cgoinv
