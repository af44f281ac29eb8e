// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "cgoinv/acceptance.h"
#include "cgoinv/cgo.h"
#include "cgoinv/errors.h"
#include "cgoinv/subspaces.h"
#include "common/seeds.h"

namespace cgoinv {
namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

double Dot(std::span<const double> a, std::span<const int> k) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * k[i];
  return s;
}

Complex Square(std::span<const Complex> z) {
  Complex s = 0.0;
  for (const Complex& v : z) s += v * v;
  return s;
}

// Smooth real potential from a few low modes.
Field SmoothPotential(const TorusGrid& grid, std::uint64_t seed, double amplitude) {
  const SubspaceBasis band(SubspaceSpec::Bandlimited(3, 2), grid);
  return RandomElement(band, BoxConstraint(amplitude), seed);
}

TEST(FrameTest, CanonicalCases) {
  const std::array<int, 3> e1{1, 0, 0};
  auto [xi, eta] = MakeFrame(e1);
  EXPECT_EQ(xi, (std::vector<double>{0, 1, 0}));
  EXPECT_EQ(eta, (std::vector<double>{0, 0, 1}));

  const std::array<int, 3> zero{0, 0, 0};
  auto [xi0, eta0] = MakeFrame(zero);
  EXPECT_EQ(xi0, (std::vector<double>{1, 0, 0}));
  EXPECT_EQ(eta0, (std::vector<double>{0, 1, 0}));

  const std::array<int, 2> flat{1, 0};
  EXPECT_THROW(MakeFrame(flat), DimensionError);
}

void ExpectFrame(std::span<const int> k, double tol) {
  auto [xi, eta] = MakeFrame(k);
  double nx = 0.0, ne = 0.0, xe = 0.0;
  for (std::size_t a = 0; a < k.size(); ++a) {
    nx += xi[a] * xi[a];
    ne += eta[a] * eta[a];
    xe += xi[a] * eta[a];
  }
  double knorm = 0.0;
  for (int v : k) knorm += double(v) * v;
  knorm = std::max(1.0, std::sqrt(knorm));
  EXPECT_NEAR(nx, 1.0, tol);
  EXPECT_NEAR(ne, 1.0, tol);
  EXPECT_NEAR(xe, 0.0, tol);
  EXPECT_NEAR(Dot(xi, k), 0.0, tol * knorm);
  EXPECT_NEAR(Dot(eta, k), 0.0, tol * knorm);
}

TEST(FrameTest, DiagonalFrequency) {
  const std::array<int, 3> k{1, 1, 1};
  ExpectFrame(k, 1e-14);
  // Gram-Schmidt of e_1, e_2 against k by hand.
  auto [xi, eta] = MakeFrame(k);
  const double s6 = std::sqrt(6.0), s2 = std::sqrt(2.0);
  EXPECT_NEAR(xi[0], 2.0 / s6, 1e-15);
  EXPECT_NEAR(xi[1], -1.0 / s6, 1e-15);
  EXPECT_NEAR(xi[2], -1.0 / s6, 1e-15);
  EXPECT_NEAR(eta[0], 0.0, 1e-15);
  EXPECT_NEAR(eta[1], 1.0 / s2, 1e-15);
  EXPECT_NEAR(eta[2], -1.0 / s2, 1e-15);
}

TEST(FrameTest, AxisAlignedAlongFirstTwoAxes) {
  // k parallel to e_2: e_1 and e_3 are used.
  const std::array<int, 3> k{0, 3, 0};
  auto [xi, eta] = MakeFrame(k);
  EXPECT_EQ(xi, (std::vector<double>{1, 0, 0}));
  EXPECT_EQ(eta, (std::vector<double>{0, 0, 1}));
}

TEST(ZetaTest, WorkedExample) {
  const std::array<int, 3> k{1, 0, 0};
  const ComplexFrequency z = MakeZeta(k, 2.0);
  const std::vector<Complex> expected{-kPi * kI, -2.0 * kI, std::sqrt(4.0 + kPi * kPi)};
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(std::abs(z.zeta1[a] - expected[a]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(Square(z.zeta1)), 0.0, 1e-13);
  EXPECT_EQ(z.t, 2.0);
  EXPECT_EQ(z.t_nominal, 2.0);
}

TEST(ZetaTest, ZeroFrequency) {
  const std::array<int, 3> k{0, 0, 0};
  const ComplexFrequency z = MakeZeta(k, 1.0);
  double re = 0.0, im = 0.0;
  for (int a = 0; a < 3; ++a) {
    EXPECT_NEAR(std::abs(z.zeta1[a] - (-kI * z.xi[a] + z.eta[a])), 0.0, 1e-15);
    re += std::norm(z.zeta1[a].real());
    im += std::norm(z.zeta1[a].imag());
  }
  EXPECT_NEAR(re, 1.0, 1e-15);
  EXPECT_NEAR(im, 1.0, 1e-15);
}

TEST(ZetaTest, IdentitiesOnRandomFrequencies) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coord(-6, 6);
  std::uniform_real_distribution<double> tdist(0.0, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::array<int, 3> k{coord(rng), coord(rng), coord(rng)};
    const double t = tdist(rng);
    ExpectFrame(k, 1e-12);
    const ComplexFrequency z = MakeZeta(k, t);
    EXPECT_NEAR(std::abs(Square(z.zeta1)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(Square(z.zeta2)), 0.0, 1e-12);
    for (int a = 0; a < 3; ++a) {
      EXPECT_NEAR(std::abs(z.zeta1[a] + z.zeta2[a] + 2.0 * kPi * kI * double(k[a])), 0.0, 1e-12);
    }
  }
}

TEST(SymbolTest, HandArithmetic) {
  const std::vector<Complex> zeta{-kPi * kI, -2.0 * kI, std::sqrt(4.0 + kPi * kPi)};
  const std::array<int, 3> m0{0, 0, 0}, m1{1, 0, 0}, m2{0, 1, 0};
  EXPECT_EQ(FaddeevSymbol(m0, zeta), Complex(0.0));
  EXPECT_NEAR(std::abs(FaddeevSymbol(m1, zeta)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(FaddeevSymbol(m2, zeta) - (-4.0 * kPi * kPi + 8.0 * kPi)), 0.0, 1e-12);
}

// sigma(k) = -4 pi^2 |k|^2 + 4 pi i zeta.k = 0 for every t: it is grounded,
// not nudged.
TEST(SymbolTest, GroundedFrequencies) {
  const std::array<int, 3> k{1, 0, 0};
  const ComplexFrequency z = MakeZeta(k, 2.0);
  const std::array<int, 3> m0{0, 0, 0}, m2{0, 1, 0}, m3{2, 0, 0};
  EXPECT_TRUE(IsGrounded(z, m0));
  EXPECT_TRUE(IsGrounded(z, k));
  EXPECT_FALSE(IsGrounded(z, m2));
  EXPECT_FALSE(IsGrounded(z, m3));
  for (double t : {0.5, 3.0, 40.0}) {
    EXPECT_NEAR(std::abs(FaddeevSymbol(k, MakeZeta(k, t).zeta1)), 0.0, 1e-10);
  }
}

TEST(ResonanceGuardTest, GenericTIsUnchanged) {
  const TorusGrid grid(3, 16);
  const SolverConfig config;
  const std::array<int, 3> k{2, -1, 1};
  const ComplexFrequency z = MakeZeta(k, std::sqrt(2.0) * 10.0);
  const ComplexFrequency g = ResonanceGuard(z, grid, config);
  EXPECT_EQ(g.t, z.t);
  EXPECT_GE(MinSymbol(g, grid).value, config.resonance_delta * g.t);

  const std::array<int, 3> zero{0, 0, 0};
  const ComplexFrequency big = MakeZeta(zero, 1000.0);
  EXPECT_EQ(ResonanceGuard(big, grid, config).t, 1000.0);
}

// k = e_1, t = pi: sigma(m) = 4 pi (pi m_1 + t m_2 - pi |m|^2) + i(...) m_3
// vanishes at m = (0,1,0) and (1,1,0).
TEST(ResonanceGuardTest, LatticeResonanceIsNudged) {
  const TorusGrid grid(3, 16);
  const SolverConfig config;
  const std::array<int, 3> k{1, 0, 0};
  const ComplexFrequency z = MakeZeta(k, kPi);
  const SymbolMinimum before = MinSymbol(z, grid);
  EXPECT_LT(before.value, 1e-9);
  const ComplexFrequency g = ResonanceGuard(z, grid, config);
  EXPECT_GT(g.t, z.t);
  EXPECT_EQ(g.t_nominal, kPi);
  const double steps = std::log(g.t / kPi) / std::log(config.nudge_factor);
  EXPECT_NEAR(steps, std::round(steps), 1e-6);
  EXPECT_GE(MinSymbol(g, grid).value, config.resonance_delta * g.t);

  SolverConfig strict = config;
  strict.max_nudges = 0;
  try {
    ResonanceGuard(z, grid, strict);
    FAIL() << "expected ResonanceGuardError";
  } catch (const ResonanceGuardError& e) {
    const std::string what = e.what();
    EXPECT_TRUE(what.find("(0,1,0)") != std::string::npos ||
                what.find("(1,1,0)") != std::string::npos)
        << what;
  }
}

TEST(SolverConfigTest, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.tol = 0.0;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  c = SolverConfig{};
  c.max_iter = 0;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  EXPECT_EQ(ParseMethod("neumann"), SolverMethod::kNeumann);
  EXPECT_EQ(ParseMethod(MethodName(SolverMethod::kKrylov)), SolverMethod::kKrylov);
  EXPECT_THROW(ParseMethod("cg"), InvalidArgument);
}

// ---------------------------------------------------------------------------

TEST(RemainderTest, ZeroPotential) {
  const TorusGrid grid(3, 8);
  const std::array<int, 3> k{1, 1, 0};
  const RemainderSolution sol =
      SolveRemainder(Field::Zeros(grid), MakeZeta(k, 7.0), SolverConfig{});
  EXPECT_EQ(sol.iterations, 0);
  EXPECT_EQ(SupNorm(sol.r), 0.0);
  EXPECT_EQ(sol.residual, 0.0);
}

TEST(RemainderTest, ConstantPotentialGivesZero) {
  const TorusGrid grid(3, 8);
  Field q(grid);
  for (Complex& v : q.values) v = 2.5;
  const std::array<int, 3> k{1, 0, 1};
  const ComplexFrequency z = ResonanceGuard(MakeZeta(k, 9.0), grid, SolverConfig{});
  const RemainderSolution sol = SolveRemainder(q, z, SolverConfig{});
  EXPECT_LE(SupNorm(sol.r), 1e-12);
  const Spectrum dense = acceptance::DenseRemainder(q, z);
  for (const Complex& c : dense.coeffs) EXPECT_LE(std::abs(c), 1e-12);
}

TEST(RemainderTest, KrylovMatchesDenseGalerkin) {
  const TorusGrid grid(3, 8);
  SolverConfig config;
  config.tol = 1e-12;
  const FreqOrdering ord = MakeOrdering(OrderingKind::kHyperbolic, 3, 8);
  for (int i = 0; i < 4; ++i) {
    const Field q = SmoothPotential(grid, 100 + i, 4.0);
    const ComplexFrequency z = ResonanceGuard(MakeZeta(ord[i + 1], 6.0 + 3.0 * i), grid, config);
    Spectrum rhat(grid);
    const RemainderSolution sol = SolveRemainderSpectral(q, z, config, rhat);
    EXPECT_LE(sol.residual, config.tol);
    const Spectrum dense = acceptance::DenseRemainder(q, z);
    double diff = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) diff += std::norm(rhat.coeffs[j] - dense.coeffs[j]);
    EXPECT_LE(std::sqrt(diff), 1e-8) << "potential " << i;
    // The field and spectral entry points agree.
    const RemainderSolution field = SolveRemainder(q, z, config);
    EXPECT_LE(L2Distance(field.r, InverseTransform(rhat)), 1e-12);
  }
}

TEST(RemainderTest, NeumannAgreesWithKrylov) {
  const TorusGrid grid(3, 8);
  const std::array<int, 3> k{1, -1, 2};
  const Field q = SmoothPotential(grid, 5, 2.0);
  SolverConfig krylov, neumann;
  krylov.tol = neumann.tol = 1e-12;
  neumann.method = SolverMethod::kNeumann;
  const ComplexFrequency z = ResonanceGuard(MakeZeta(k, 30.0), grid, krylov);
  const RemainderSolution a = SolveRemainder(q, z, krylov);
  const RemainderSolution b = SolveRemainder(q, z, neumann);
  EXPECT_EQ(b.method, SolverMethod::kNeumann);
  EXPECT_LE(a.residual, krylov.tol);
  EXPECT_LE(b.residual, neumann.tol);
  EXPECT_LE(L2Distance(a.r, b.r), 1e-8);
  EXPECT_GT(b.iterations, 1);
}

// min |sigma| stays near 4 pi^2 for small t; a large potential breaks the
// Neumann contraction while GMRES still converges.
TEST(RemainderTest, NeumannDivergesForLargePotential) {
  const TorusGrid grid(3, 8);
  const std::array<int, 3> k{1, 0, 0};
  const Field q = SmoothPotential(grid, 8, 2000.0);
  SolverConfig neumann;
  neumann.method = SolverMethod::kNeumann;
  const ComplexFrequency z = ResonanceGuard(MakeZeta(k, 0.5), grid, neumann);
  EXPECT_THROW(SolveRemainder(q, z, neumann), SolverDivergenceError);
}

TEST(RemainderTest, IterationCap) {
  const TorusGrid grid(3, 8);
  const std::array<int, 3> k{1, 1, 1};
  const Field q = SmoothPotential(grid, 9, 5.0);
  SolverConfig config;
  config.max_iter = 1;
  config.tol = 1e-14;
  const ComplexFrequency z = ResonanceGuard(MakeZeta(k, 3.0), grid, config);
  EXPECT_THROW(SolveRemainder(q, z, config), IterationCapError);
}

TEST(RemainderTest, ResidualContract) {
  const TorusGrid grid(3, 8);
  const FreqOrdering ord = MakeOrdering(OrderingKind::kHyperbolic, 3, 20);
  const Field q = SmoothPotential(grid, 12, 5.0);
  for (SolverMethod method : {SolverMethod::kKrylov, SolverMethod::kNeumann}) {
    SolverConfig config;
    config.method = method;
    for (std::size_t l = 0; l < ord.size(); ++l) {
      const ComplexFrequency z = ResonanceGuard(MakeZeta(ord[l], 25.0), grid, config);
      const RemainderSolution sol = SolveRemainder(q, z, config);
      EXPECT_LE(sol.residual, config.tol) << MethodName(method) << " l0 = " << l;
      EXPECT_EQ(sol.t_used, z.t);
    }
  }
}

// e^{zeta_2.x} psi(x) = e^{-2 pi i k.x} (1 + r(x)) with psi = e^{zeta_1.x}(1 + r).
TEST(RemainderTest, PsiIdentity) {
  const TorusGrid grid(3, 8);
  const std::array<int, 3> k{2, 1, -1};
  const Field q = SmoothPotential(grid, 13, 3.0);
  const ComplexFrequency z = ResonanceGuard(MakeZeta(k, 8.0), grid, SolverConfig{});
  const RemainderSolution sol = SolveRemainder(q, z, SolverConfig{});
  std::vector<int> j(3);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.NodeAt(i, j);
    Complex e1 = 0.0, e2 = 0.0;
    double phase = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double x = j[a] * grid.spacing();
      e1 += z.zeta1[a] * x;
      e2 += z.zeta2[a] * x;
      phase += k[a] * x;
    }
    const Complex psi = std::exp(e1) * (1.0 + sol.r.values[i]);
    const Complex lhs = std::exp(e2) * psi;
    const Complex rhs = std::polar(1.0, -2.0 * kPi * phase) * (1.0 + sol.r.values[i]);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  EXPECT_LE(worst, 1e-12);
}

// ---------------------------------------------------------------------------

double Slope(const std::vector<DecayPoint>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(pts.size());
  for (const DecayPoint& p : pts) {
    const double x = std::log(p.t_used), y = std::log(p.norm);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TEST(DecayTest, ZeroPotential) {
  const TorusGrid grid(3, 8);
  const std::array<int, 3> k{2, 1, 0};
  const std::vector<double> ts{20, 40, 80};
  for (const DecayPoint& p : RemainderDecay(Field::Zeros(grid), k, ts, SolverConfig{})) {
    EXPECT_EQ(p.norm, 0.0);
  }
}

// The last doubling of the list; past t = 160 near-resonant modes in the
// m_3 = 0 plane make single doublings uneven (t = 320 in particular).
TEST(DecayTest, InverseTRate) {
  const TorusGrid grid(3, 16);
  const SubspaceBasis basis(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)), grid);
  const std::array<int, 3> k{2, 1, 0};
  const std::vector<double> ts{20, 40, 80, 160};
  for (std::uint64_t stream = 0; stream < 10; ++stream) {
    const Field q = RandomElement(basis, BoxConstraint(5.0), internal::DeriveSeed(4, stream));
    const std::vector<DecayPoint> pts = RemainderDecay(q, k, ts, SolverConfig{});
    ASSERT_EQ(pts.size(), 4u);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EXPECT_GE(pts[i].t_used, ts[i]);
      EXPECT_LE(pts[i].t_used, ts[i] * 1.01);
    }
    EXPECT_LE(Slope(pts), -0.9) << "stream " << stream;
    EXPECT_LE(pts[3].norm / pts[2].norm, 0.6) << "stream " << stream;
  }
}

TEST(DecayTest, GradientStaysBounded) {
  const TorusGrid grid(3, 16);
  const SubspaceBasis basis(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)), grid);
  const Field q = RandomElement(basis, BoxConstraint(5.0), 78);
  const std::array<int, 3> k{2, 1, 0};
  const SolverConfig config;
  auto gradient = [&](double t) {
    const ComplexFrequency z = ResonanceGuard(MakeZeta(k, t), grid, config);
    return GradientL2Norm(SolveRemainder(q, z, config).r);
  };
  EXPECT_LE(gradient(160.0), 2.0 * gradient(20.0));
}

TEST(SidecarTest, Keys) {
  const TorusGrid grid(3, 8);
  const std::array<int, 3> k{1, 0, 1};
  const ComplexFrequency z = ResonanceGuard(MakeZeta(k, 12.0), grid, SolverConfig{});
  const RemainderSolution sol = SolveRemainder(SmoothPotential(grid, 3, 1.0), z, SolverConfig{});
  std::ostringstream out;
  WriteRemainderSidecar(out, sol);
  const nlohmann::json j = nlohmann::json::parse(out.str());
  for (const char* key : {"k", "t_requested", "t_used", "residual", "iterations", "method"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["k"], nlohmann::json::array({1, 0, 1}));
  EXPECT_EQ(j["method"], "krylov");
  EXPECT_EQ(j["iterations"].get<int>(), sol.iterations);
}

}  // namespace
}  // namespace cgoinv
