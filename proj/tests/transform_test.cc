// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "cgoinv/acceptance.h"
#include "cgoinv/errors.h"
#include "cgoinv/kernels.h"
#include "cgoinv/transform.h"

namespace cgoinv {
namespace {

double MaxDiff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  EXPECT_EQ(a.size(), b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double MaxAbs(const std::vector<Complex>& a) {
  double m = 0.0;
  for (const Complex& v : a) m = std::max(m, std::abs(v));
  return m;
}

TSchedule Schedule(double tau) {
  TSchedule s = TSchedule::Default(3);
  s.tau = tau;
  return s;
}

struct Bench {
  TorusGrid grid;
  SubspaceBasis basis;
  FreqOrdering ordering;
  Bench(SubspaceSpec spec, int n, std::size_t count)
      : grid(3, n),
        basis(std::move(spec), grid),
        ordering(MakeOrdering(OrderingKind::kHyperbolic, 3, count)) {}
};

TEST(ScheduleTest, RuleAndValidation) {
  const TSchedule d = TSchedule::Default(3);
  EXPECT_EQ(d.s, 3.0);
  EXPECT_EQ(d.tau, 1.0);
  EXPECT_NO_THROW(d.Validate(3));
  const std::array<int, 3> k{1, 2, 2};
  EXPECT_NEAR(Schedule(0.5).T(k), 0.5 * (27.0 + 1.0), 1e-12);
  const std::array<int, 3> zero{0, 0, 0};
  EXPECT_EQ(d.T(zero), 1.0);

  TSchedule bad = d;
  bad.tau = 0.0;
  EXPECT_THROW(bad.Validate(3), InvalidArgument);
  bad = d;
  bad.s = 1.5;
  EXPECT_THROW(bad.Validate(3), InvalidArgument);
  bad = d;
  bad.p = 5.0;  // needs s > 15/4
  EXPECT_THROW(bad.Validate(3), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Measurement operators.

TEST(OperatorTest, ZeroAndConstantPotentials) {
  Bench s(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)), 8, 27);
  const MeasurementOperator op(s.basis, s.ordering, Schedule(1.0), SolverConfig{}, 27, 1);
  const std::vector<Complex> zero(s.basis.size());
  EXPECT_EQ(MaxAbs(op.B(zero)), 0.0);
  EXPECT_EQ(MaxAbs(op.U(zero)), 0.0);

  std::vector<Complex> cells(s.basis.cells().cells.size(), Complex(3.0));
  const std::vector<Complex> c = s.basis.FromCellValues(cells);
  EXPECT_LE(MaxAbs(op.B(c)), 1e-12);
  // F of a constant is a Kronecker delta at k = 0.
  const std::vector<Complex> f = op.F(c);
  EXPECT_NEAR(std::abs(f[0] - 3.0), 0.0, 1e-13);
  for (std::size_t l = 1; l < f.size(); ++l) EXPECT_LE(std::abs(f[l]), 1e-13);
}

struct PathCase {
  const char* name;
  SubspaceSpec spec;
};

class TwoPathTest : public ::testing::TestWithParam<int> {};

// U from F + B against the direct integrand e^{zeta_2.x} psi.
TEST_P(TwoPathTest, UDirectMatchesFPlusB) {
  const std::vector<PathCase> cases{
      {"piecewise", SubspaceSpec::Piecewise(Partition::Dyadic(3, 1))},
      {"bandlimited", SubspaceSpec::Bandlimited(3, 1)},
      {"haar", SubspaceSpec::Haar(3, 1)}};
  const PathCase& pc = cases[GetParam()];
  Bench s(pc.spec, 8, 20);
  const MeasurementOperator op(s.basis, s.ordering, Schedule(0.5), SolverConfig{}, 20, 1);
  double worst = 0.0, exact = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::vector<Complex> c = RandomCoefficients(s.basis, BoxConstraint(3.0), seed);
    std::vector<Complex> f, b;
    op.FB(c, &f, &b);
    const std::vector<Complex> u = op.U(c);
    worst = std::max(worst, MaxDiff(u, op.UDirect(c)));
    for (std::size_t l = 0; l < u.size(); ++l) exact = std::max(exact, std::abs(u[l] - b[l] - f[l]));
  }
  EXPECT_LE(worst, 1e-10) << pc.name;
  EXPECT_LE(exact, 1e-14) << pc.name;
}

INSTANTIATE_TEST_SUITE_P(Families, TwoPathTest, ::testing::Values(0, 1, 2));

// For bandlimited q and k well inside the grid box the product q r_l has no
// alias onto k, so the grid transform of q r_l is exact.
TEST(OperatorTest, BMatchesGridTransformOfProduct) {
  Bench s(SubspaceSpec::Bandlimited(3, 1), 16, 60);
  const std::size_t N = 60;
  const SolverConfig config;
  const MeasurementOperator op(s.basis, s.ordering, Schedule(0.5), config, N, 1);
  const std::vector<Complex> c = RandomCoefficients(s.basis, BoxConstraint(4.0), 11);
  const std::vector<Complex> b = op.B(c);
  const Field q = s.basis.Synthesize(c);
  RemainderSolver solver(q, config);
  int checked = 0;
  for (std::size_t l = 0; l < N; ++l) {
    const std::span<const int> k = s.ordering[l];
    if (std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])}) > 16 / 2 - 2) continue;
    Spectrum rhat(s.grid);
    solver.Solve(op.frequency(l), &rhat);
    Field prod = InverseTransform(rhat);
    for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] *= q.values[i];
    EXPECT_NEAR(std::abs(ForwardTransform(prod).at(k) - b[l]), 0.0, 1e-12) << "l0 = " << l;
    ++checked;
  }
  EXPECT_GE(checked, 50);
}

TEST(OperatorTest, ThreadCountDoesNotChangeValues) {
  Bench s(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)), 8, 40);
  MeasurementOperator op(s.basis, s.ordering, Schedule(0.5), SolverConfig{}, 40, 1);
  const std::vector<Complex> c = RandomCoefficients(s.basis, BoxConstraint(5.0), 4);
  const std::vector<Complex> one = op.U(c);
  op.set_threads(3);
  EXPECT_EQ(one, op.U(c));
}

// Modes m = j k_l (j != 0, 1) have a t-independent symbol, so B tends to a
// nonzero limit as tau grows and the rest decays like 1/t.
TEST(OperatorTest, BConvergesAtRateOneOverT) {
  Bench s(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)), 8, 27);
  for (std::uint64_t seed : {21, 22, 23}) {
    const std::vector<Complex> c = RandomCoefficients(s.basis, BoxConstraint(5.0), seed);
    std::vector<std::vector<Complex>> bs;
    for (double tau : {256.0, 512.0, 1024.0, 2048.0}) {
      const MeasurementOperator op(s.basis, s.ordering, Schedule(tau), SolverConfig{}, 27, 1);
      bs.push_back(op.B(c));
    }
    std::vector<double> steps;
    for (std::size_t j = 1; j < bs.size(); ++j) {
      steps.push_back(std::sqrt(kernels::DistanceSquared(bs[j], bs[j - 1])));
    }
    for (std::size_t j = 1; j < steps.size(); ++j) {
      EXPECT_NEAR(steps[j] / steps[j - 1], 0.5, 0.05) << "seed " << seed;
    }
    EXPECT_GT(std::sqrt(kernels::NormSquared(bs.back())), 10.0 * steps.back());
  }
}

TEST(OperatorTest, ArgumentChecks) {
  Bench s(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)), 8, 10);
  EXPECT_THROW(MeasurementOperator(s.basis, s.ordering, Schedule(1.0), SolverConfig{}, 0),
               InvalidArgument);
  EXPECT_THROW(MeasurementOperator(s.basis, s.ordering, Schedule(1.0), SolverConfig{}, 11),
               InvalidArgument);
  const MeasurementOperator op(s.basis, s.ordering, Schedule(1.0), SolverConfig{}, 10);
  EXPECT_THROW(op.B(std::vector<Complex>(3)), DimensionError);
  const SubspaceBasis gridless(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)));
  EXPECT_THROW(MeasurementOperator(gridless, s.ordering, Schedule(1.0), SolverConfig{}, 5),
               InvalidArgument);
}

TEST(OperatorTest, CoefficientsInW) {
  Bench s(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)), 8, 1);
  const std::vector<Complex> c = RandomCoefficients(s.basis, BoxConstraint(2.0), 9);
  const std::vector<Complex> back = CoefficientsInW(s.basis.Synthesize(c), s.basis);
  EXPECT_LE(MaxDiff(c, back), 1e-13);
  const Field wave = Field::Sample(s.grid, [](std::span<const double> x) {
    return Complex(std::cos(2.0 * std::numbers::pi * x[0]));
  });
  EXPECT_THROW(CoefficientsInW(wave, s.basis), InvalidArgument);
}

TEST(OperatorTest, ResimulationFromStoredField) {
  Bench s(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)), 8, 60);
  const MeasurementOperator op(s.basis, s.ordering, Schedule(4.0), SolverConfig{}, 60);
  const std::vector<Complex> c = RandomCoefficients(s.basis, BoxConstraint(2.0), 10);
  std::stringstream file;
  WriteField(file, s.basis.Synthesize(c));
  const std::vector<Complex> back = CoefficientsInW(ReadField(file), s.basis);
  EXPECT_LE(MaxDiff(op.U(c), op.U(back)), 1e-12);
}

// ---------------------------------------------------------------------------
// Balancing.

TEST(BalancingTest, EmptyTruncation) {
  const SubspaceBasis basis(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)));
  const FreqOrdering ord = MakeOrdering(OrderingKind::kHyperbolic, 3, 10);
  EXPECT_NEAR(BalancingNorm(basis, ord, 0), 1.0, 1e-15);
  EXPECT_EQ(ChooseN(basis, OrderingKind::kHyperbolic, 1.0, 100), 1u);
}

TEST(BalancingTest, BandlimitedBoxOrdering) {
  for (int B : {1, 2}) {
    const SubspaceBasis basis(SubspaceSpec::Bandlimited(3, B));
    const std::size_t dim = static_cast<std::size_t>(std::pow(2 * B + 1, 3));
    const FreqOrdering ord = MakeOrdering(OrderingKind::kBox, 3, dim + 10);
    EXPECT_LE(BalancingNorm(basis, ord, dim), 1e-12);
    // One basis vector keeps all of its mass in the tail.
    EXPECT_NEAR(BalancingNorm(basis, ord, dim - 1), 1.0, 1e-12);
    EXPECT_EQ(ChooseN(basis, OrderingKind::kBox, 0.25, 1000), dim);
  }
}

TEST(BalancingTest, TwoCellOracle) {
  std::array<int, 3> per_axis{2, 1, 1};
  const SubspaceBasis basis(SubspaceSpec::Piecewise(Partition::Uniform(per_axis)));
  const FreqOrdering ord = MakeOrdering(OrderingKind::kHyperbolic, 3, 27);
  for (std::size_t N : {std::size_t{1}, std::size_t{27}}) {
    EXPECT_NEAR(BalancingNorm(basis, ord, N), acceptance::TwoCellTailNorm(N), 1e-6) << N;
  }
}

TEST(BalancingTest, NonIncreasingInUnitInterval) {
  const SubspaceBasis basis(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)));
  const FreqOrdering ord = MakeOrdering(OrderingKind::kHyperbolic, 3, 400);
  const Eigen::MatrixXcd C = FourierMatrix(basis, ord, 400);
  double previous = 1.0;
  for (std::size_t N = 0; N <= 400; ++N) {
    const double v = BalancingNormFromMatrix(C, N);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, previous + 1e-12) << N;
    previous = v;
  }
  EXPECT_NEAR(BalancingNormFromMatrix(C, 200), BalancingNorm(basis, ord, 200), 1e-14);
}

TEST(BalancingTest, ChooseNIsMinimalAndMonotoneInM) {
  std::vector<std::array<int, 3>> shapes{{2, 1, 1}, {2, 2, 1}, {2, 2, 2}};
  std::size_t previous = 0;
  for (const auto& shape : shapes) {
    const SubspaceBasis basis(SubspaceSpec::Piecewise(Partition::Uniform(shape)));
    const std::size_t N = ChooseN(basis, OrderingKind::kHyperbolic, 0.25, 20000);
    const FreqOrdering ord = MakeOrdering(OrderingKind::kHyperbolic, 3, N);
    EXPECT_LE(BalancingNorm(basis, ord, N), 0.25);
    EXPECT_GT(BalancingNorm(basis, ord, N - 1), 0.25);
    EXPECT_GE(N, previous);
    previous = N;
  }
}

TEST(BalancingTest, NotFound) {
  const SubspaceBasis basis(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)));
  try {
    ChooseN(basis, OrderingKind::kHyperbolic, 0.25, 50);
    FAIL() << "expected NotFoundError";
  } catch (const NotFoundError& e) {
    EXPECT_GT(e.norm_at_max(), 0.25);
  }
}

// ---------------------------------------------------------------------------
// Calibration.

TEST(CalibrationTest, SmallRadiusAcceptsTau0) {
  Bench s(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)), 8, 27);
  CalibrationOptions options;
  options.seed = 5;
  const CalibrationResult r = CalibrateTau(s.basis, BoxConstraint(1e-6), s.ordering,
                                           TSchedule::Default(3), SolverConfig{}, 27, options);
  ASSERT_EQ(r.history.size(), 1u);
  EXPECT_EQ(r.schedule.tau, options.tau0);
  EXPECT_LE(r.ratio, 0.45);
  EXPECT_EQ(r.history[0].evaluations, 2 * options.probes);
}

TEST(CalibrationTest, DoublingContract) {
  Bench s(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)), 8, 27);
  const BoxConstraint box(20.0);
  CalibrationOptions options;
  options.seed = 6;
  options.tau0 = 0.01;
  const CalibrationResult r = CalibrateTau(s.basis, box, s.ordering, TSchedule::Default(3),
                                           SolverConfig{}, 27, options);
  ASSERT_GE(r.history.size(), 2u);
  for (std::size_t j = 0; j + 1 < r.history.size(); ++j) {
    EXPECT_GT(r.history[j].ratio, 0.45);
    EXPECT_NEAR(r.history[j + 1].tau, 2.0 * r.history[j].tau, 1e-15);
  }
  EXPECT_LE(r.ratio, 0.45);
  EXPECT_EQ(r.schedule.tau, r.history.back().tau);
  EXPECT_EQ(r.history.back().evaluations, 2 * options.probes);
  for (std::size_t j = 0; j + 1 < r.history.size(); ++j) {
    EXPECT_LE(r.history[j].evaluations, 2 * options.probes);
  }
}

TEST(CalibrationTest, Deterministic) {
  Bench s(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)), 8, 20);
  CalibrationOptions options;
  options.seed = 7;
  options.tau0 = 0.05;
  auto run = [&](int threads) {
    options.threads = threads;
    return CalibrateTau(s.basis, BoxConstraint(10.0), s.ordering, TSchedule::Default(3),
                        SolverConfig{}, 20, options);
  };
  const CalibrationResult a = run(1), b = run(2);
  EXPECT_EQ(a.schedule.tau, b.schedule.tau);
  EXPECT_EQ(a.ratio, b.ratio);
}

TEST(CalibrationTest, Failure) {
  Bench s(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)), 8, 10);
  CalibrationOptions options;
  options.tau0 = 1e-6;
  options.max_doublings = 1;
  EXPECT_THROW(CalibrateTau(s.basis, BoxConstraint(50.0), s.ordering, TSchedule::Default(3),
                            SolverConfig{}, 10, options),
               CalibrationError);
  options.probes = 9;
  EXPECT_THROW(CalibrateTau(s.basis, BoxConstraint(1.0), s.ordering, TSchedule::Default(3),
                            SolverConfig{}, 10, options),
               InvalidArgument);
}

TEST(RandomPairsTest, DistinctAndDeterministic) {
  Bench s(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)), 8, 1);
  std::vector<std::vector<Complex>> a1, a2, b1, b2;
  RandomPairs(s.basis, BoxConstraint(5.0), 12, 99, &a1, &a2);
  RandomPairs(s.basis, BoxConstraint(5.0), 12, 99, &b1, &b2);
  ASSERT_EQ(a1.size(), 12u);
  EXPECT_EQ(a1, b1);
  EXPECT_EQ(a2, b2);
  for (std::size_t p = 0; p < a1.size(); ++p) {
    EXPECT_GT(kernels::DistanceSquared(a1[p], a2[p]), 0.0);
    for (const Complex& v : s.basis.CellValues(a1[p])) EXPECT_LE(std::abs(v), 5.0);
  }
}

// ---------------------------------------------------------------------------
// Wire format.

MeasurementVector SampleMeasurement() {
  MeasurementVector y;
  y.N = 3;
  y.ordering = OrderingKind::kHyperbolic;
  y.schedule = Schedule(0.3);
  y.solver.tol = 1e-9;
  y.grid_n = 16;
  y.values = {Complex(1.0 / 3.0, -2.5e-17), Complex(0.0, 1e300), Complex(-4.0, 0.1)};
  return y;
}

TEST(MeasurementJsonTest, RoundTripIsExact) {
  const MeasurementVector y = SampleMeasurement();
  std::stringstream io;
  WriteMeasurement(io, y);
  const MeasurementVector back = ReadMeasurement(io);
  EXPECT_EQ(back.N, y.N);
  EXPECT_EQ(back.ordering, y.ordering);
  EXPECT_EQ(back.schedule.s, y.schedule.s);
  EXPECT_EQ(back.schedule.tau, y.schedule.tau);
  EXPECT_EQ(back.schedule.p, y.schedule.p);
  EXPECT_EQ(back.solver.tol, y.solver.tol);
  EXPECT_EQ(back.grid_n, y.grid_n);
  EXPECT_EQ(back.values, y.values);
}

TEST(MeasurementJsonTest, SchemaErrors) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return ReadMeasurement(in);
  };
  const std::string good =
      R"({"N": 1, "ordering": "hyperbolic", "s": 3, "tau": 1, "values": [[1, 0]]})";
  EXPECT_NO_THROW(parse(good));
  EXPECT_THROW(parse("{not json"), SchemaError);
  EXPECT_THROW(parse(R"({"ordering": "hyperbolic", "s": 3, "tau": 1, "values": [[1, 0]]})"),
               SchemaError);
  EXPECT_THROW(parse(R"({"N": 2, "ordering": "hyperbolic", "s": 3, "tau": 1,
                         "values": [[1, 0]]})"),
               SchemaError);
  EXPECT_THROW(parse(R"({"N": 1, "ordering": "spiral", "s": 3, "tau": 1,
                         "values": [[1, 0]]})"),
               SchemaError);
  EXPECT_THROW(parse(R"({"N": 1, "ordering": "box", "s": "3", "tau": 1,
                         "values": [[1, 0]]})"),
               SchemaError);
  EXPECT_THROW(parse(R"({"N": 1, "ordering": "box", "s": 3, "tau": 1,
                         "values": [[1, 0, 2]]})"),
               SchemaError);
  EXPECT_THROW(parse(R"({"N": 1, "ordering": "box", "s": 3, "tau": 1, "extra": 0,
                         "values": [[1, 0]]})"),
               SchemaError);
}

}  // namespace
}  // namespace cgoinv
