// SPDX-License-Identifier: Apache-2.0
#include "cgoinv/acceptance.h"

#include <Eigen/Dense>
#include <boost/math/special_functions/trigamma.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "cgoinv/errors.h"
#include "cgoinv/kernels.h"
#include "cgoinv/parallel.h"
#include "cgoinv/recon.h"
#include "cgoinv/subspaces.h"
#include "cgoinv/transform.h"
#include "common/seeds.h"

namespace cgoinv::acceptance {
namespace {

constexpr double kPi = std::numbers::pi;

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double Distance(std::span<const Complex> a, std::span<const Complex> b) {
  return std::sqrt(kernels::DistanceSquared(a, b));
}

// Objects shared by criteria 5-8, built on first use.
class Context {
 public:
  explicit Context(const Options& options)
      : options_(options),
        grid_(3, 16),
        basis_(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)), grid_),
        box_(5.0) {}

  const SubspaceBasis& basis() const { return basis_; }
  const BoxConstraint& box() const { return box_; }
  std::uint64_t Seed(std::uint64_t stream) const {
    return internal::DeriveSeed(options_.seed, stream);
  }
  void Log(const std::string& line) const {
    if (options_.progress != nullptr) *options_.progress << "  " << line << std::endl;
  }

  std::size_t N() {
    if (!N_) N_ = ChooseN(basis_, OrderingKind::kHyperbolic, 0.25, 20000);
    return *N_;
  }
  const FreqOrdering& ordering() {
    if (!ordering_) ordering_ = MakeOrdering(OrderingKind::kHyperbolic, 3, N());
    return *ordering_;
  }

  const CalibrationResult& calibration() {
    if (!calibration_) {
      CalibrationOptions c;
      c.tau0 = 0.1;
      c.margin = 0.05;
      c.probes = 10;
      c.seed = Seed(1);
      c.threads = options_.threads;
      Log(Fmt("calibrating tau (N = %zu)", N()));
      calibration_ = CalibrateTau(basis_, box_, ordering(), TSchedule::Default(3), solver_,
                                  N(), c);
      for (const CalibrationStep& s : calibration_->history) {
        Log(Fmt("tau = %.6g  ratio = %.4f  (%d B evaluations)", s.tau, s.ratio,
                s.evaluations));
      }
    }
    return *calibration_;
  }

  // The operator at the calibrated tau times tau_scale.
  const MeasurementOperator& op() {
    if (!op_) {
      TSchedule s = calibration().schedule;
      s.tau *= options_.tau_scale;
      op_ = std::make_unique<MeasurementOperator>(basis_, ordering(), s, solver_, N(),
                                                  options_.threads);
    }
    return *op_;
  }

  // 20 held-out pairs (not used in calibration) with their B values.
  struct Pairs {
    std::vector<std::vector<Complex>> first, second, b_first, b_second;
  };
  const Pairs& held_out() {
    if (!pairs_) {
      Pairs p;
      RandomPairs(basis_, box_, 20, Seed(2), &p.first, &p.second);
      Log("evaluating B on 20 held-out pairs");
      for (std::size_t i = 0; i < p.first.size(); ++i) {
        p.b_first.push_back(op().B(p.first[i]));
        p.b_second.push_back(op().B(p.second[i]));
      }
      pairs_ = std::move(p);
    }
    return *pairs_;
  }

  const std::vector<Complex>& truth() {
    if (!truth_) truth_ = RandomCoefficients(basis_, box_, Seed(3));
    return *truth_;
  }
  const std::vector<Complex>& data() {
    if (!data_) data_ = op().U(truth());
    return *data_;
  }

  ReconConfig recon_config() const { return ReconConfig{}; }

 private:
  Options options_;
  TorusGrid grid_;
  SubspaceBasis basis_;
  BoxConstraint box_;
  SolverConfig solver_;
  std::optional<std::size_t> N_;
  std::optional<FreqOrdering> ordering_;
  std::optional<CalibrationResult> calibration_;
  std::unique_ptr<MeasurementOperator> op_;
  std::optional<Pairs> pairs_;
  std::optional<std::vector<Complex>> truth_;
  std::optional<std::vector<Complex>> data_;
};

// ---------------------------------------------------------------------------

CriterionResult BandlimitedBalancing() {
  CriterionResult r{1, "bandlimited-balancing", false, "", 0.0, 1.0};
  const SubspaceBasis b1(SubspaceSpec::Bandlimited(3, 1));
  const SubspaceBasis b2(SubspaceSpec::Bandlimited(3, 2));
  const FreqOrdering ord = MakeOrdering(OrderingKind::kBox, 3, 125);
  const double norm27 = BalancingNorm(b1, ord, 27);
  const std::size_t n1 = ChooseN(b1, OrderingKind::kBox, 0.25, 1000);
  const std::size_t n2 = ChooseN(b2, OrderingKind::kBox, 0.25, 1000);
  r.pass = norm27 <= 1e-12 && n1 == 27 && n2 == 125;
  r.measured = Fmt("norm(N=27, B=1) = %.3g; N*(B=1) = %zu; N*(B=2) = %zu", norm27, n1, n2);
  return r;
}

CriterionResult GramIdentity() {
  CriterionResult r{2, "balancing-gram-oracle", true, "", 0.0, 60.0};
  std::vector<int> per_axis{2, 1, 1};
  const SubspaceBasis basis(SubspaceSpec::Piecewise(Partition::Uniform(per_axis)));
  const FreqOrdering ord = MakeOrdering(OrderingKind::kHyperbolic, 3, 125);
  double worst = 0.0;
  std::ostringstream m;
  for (std::size_t N : {1, 27, 125}) {
    const double gram = BalancingNorm(basis, ord, N);
    const double tail = TwoCellTailNorm(N);
    worst = std::max(worst, std::abs(gram - tail));
    m << Fmt("N=%zu: %.9f vs %.9f; ", N, gram, tail);
  }
  r.pass = worst <= 1e-6;
  m << Fmt("max |diff| = %.2e", worst);
  r.measured = m.str();
  return r;
}

CriterionResult SolverOracle(const Context& ctx) {
  CriterionResult r{3, "solver-dense-oracle", false, "", 0.0, 120.0};
  const TorusGrid grid(3, 10);
  const SubspaceBasis basis(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)), grid);
  const FreqOrdering ord = MakeOrdering(OrderingKind::kHyperbolic, 3, 12);
  SolverConfig config;
  config.tol = 1e-12;
  double worst = 0.0;
  int max_iter = 0;
  for (int i = 0; i < 10; ++i) {
    const Field q = RandomElement(basis, BoxConstraint(5.0), ctx.Seed(30 + i));
    const std::span<const int> k = ord[i + 1];
    const ComplexFrequency z = ResonanceGuard(MakeZeta(k, 5.0 * (i + 1)), grid, config);
    Spectrum rhat(grid);
    const RemainderSolution sol = SolveRemainderSpectral(q, z, config, rhat);
    const Spectrum dense = DenseRemainder(q, z);
    worst = std::max(worst, Distance(rhat.coeffs, dense.coeffs));
    max_iter = std::max(max_iter, sol.iterations);
  }
  r.pass = worst <= 1e-8;
  r.measured = Fmt("10 potentials on 10^3 modes: max ||rhat - rhat_dense|| = %.2e "
                   "(max Krylov iterations %d)",
                   worst, max_iter);
  return r;
}

CriterionResult RemainderDecayCriterion(const Context& ctx) {
  CriterionResult r{4, "remainder-decay", false, "", 0.0, 60.0};
  const Field q = RandomElement(ctx.basis(), ctx.box(), ctx.Seed(4));
  const std::vector<double> ts{20.0, 40.0, 80.0, 160.0};
  SolverConfig config;
  auto fit = [&](std::vector<int> k, std::string* text) {
    const std::vector<DecayPoint> pts = RemainderDecay(q, k, ts, config);
    std::vector<double> x, y;
    for (const DecayPoint& p : pts) {
      x.push_back(p.t_used);
      y.push_back(p.norm);
    }
    const double slope = LogLogSlope(x, y);
    *text = Fmt("k=(%d,%d,%d) norms %.3e %.3e %.3e %.3e slope %.3f", k[0], k[1], k[2], y[0],
                y[1], y[2], y[3], slope);
    return slope;
  };
  std::string main_text, diag_text;
  const double slope = fit({2, 1, 0}, &main_text);
  // On Z k0 the symbol does not depend on t, so for k with q^ != 0 on that
  // line the norm levels off; reported for reference only.
  fit({1, 0, 0}, &diag_text);
  r.pass = slope <= -0.9;
  r.measured = main_text + "; diagnostic " + diag_text;
  return r;
}

CriterionResult BContraction(Context& ctx) {
  CriterionResult r{5, "scattering-contraction", false, "", 0.0, 300.0};
  const CalibrationResult& cal = ctx.calibration();
  const Context::Pairs& p = ctx.held_out();
  double worst = 0.0;
  for (std::size_t i = 0; i < p.first.size(); ++i) {
    worst = std::max(worst,
                     Distance(p.b_first[i], p.b_second[i]) / Distance(p.first[i], p.second[i]));
  }
  r.pass = cal.ratio <= 0.45 && worst <= 0.5;
  r.measured = Fmt("N = %zu, calibrated tau = %.6g (probe ratio %.4f), used tau = %.6g, "
                   "held-out max ratio = %.4f",
                   ctx.N(), cal.schedule.tau, cal.ratio, ctx.op().schedule().tau, worst);
  return r;
}

CriterionResult UniquenessCertificate(Context& ctx) {
  CriterionResult r{6, "uniqueness-certificate", false, "", 0.0, 300.0};
  const Context::Pairs& p = ctx.held_out();
  const MeasurementOperator& op = ctx.op();
  double worst = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < p.first.size(); ++i) {
    std::vector<Complex> u1 = op.F(p.first[i]), u2 = op.F(p.second[i]);
    for (std::size_t l = 0; l < u1.size(); ++l) {
      u1[l] += p.b_first[i][l];
      u2[l] += p.b_second[i][l];
    }
    const double q_dist = Distance(p.first[i], p.second[i]);
    const double u_dist = Distance(u1, u2);
    ok = ok && q_dist <= 4.0 * u_dist;
    worst = std::max(worst, q_dist / u_dist);
  }
  r.pass = ok;
  r.measured = Fmt("20 pairs, N = %zu: max ||q1-q2|| / ||U(q1)-U(q2)|| = %.4f (bound 4)",
                   ctx.N(), worst);
  return r;
}

CriterionResult GlobalConvergence(Context& ctx) {
  CriterionResult r{7, "global-convergence", false, "", 0.0, 600.0};
  const MeasurementOperator& op = ctx.op();
  const Reconstructor recon(op, ctx.box(), ctx.recon_config());
  const std::vector<Complex>& truth = ctx.truth();
  const std::vector<Complex>& y = ctx.data();
  const std::vector<Complex> zero(truth.size(), 0.0);
  ctx.Log("reconstructing from q0 = 0");
  const ReconResult base = recon.Reconstruct(std::span<const Complex>(y), zero, &truth);
  const double final_error = Distance(base.coefficients, truth);
  const bool envelope = base.log.EnvelopeHolds();

  std::vector<std::vector<Complex>> limits;
  bool all_converged = base.converged;
  for (int i = 0; i < 5; ++i) {
    ctx.Log(Fmt("reconstructing from random q0 #%d", i + 1));
    const std::vector<Complex> q0 = RandomCoefficients(ctx.basis(), ctx.box(), ctx.Seed(10 + i));
    const ReconResult run = recon.Reconstruct(std::span<const Complex>(y), q0, &truth);
    all_converged = all_converged && run.converged;
    limits.push_back(run.coefficients);
  }
  double spread = 0.0;
  for (std::size_t i = 0; i < limits.size(); ++i) {
    for (std::size_t j = i + 1; j < limits.size(); ++j) {
      spread = std::max(spread, Distance(limits[i], limits[j]));
    }
  }
  r.pass = envelope && final_error <= 1e-6 && base.iterations <= 40 && base.converged &&
           spread <= 1e-8;
  r.measured = Fmt("q0=0: %d iterations, final error %.2e, envelope %s; 5 random q0: "
                   "max pairwise distance %.2e%s",
                   base.iterations, final_error, envelope ? "holds" : "VIOLATED", spread,
                   all_converged ? "" : " (not all converged)");
  return r;
}

CriterionResult PerturbationBound(Context& ctx) {
  CriterionResult r{8, "perturbation-bound", false, "", 0.0, 600.0};
  const MeasurementOperator& op = ctx.op();
  const Reconstructor recon(op, ctx.box(), ctx.recon_config());
  const std::vector<double> levels{1e-4, 1e-3, 1e-2};
  std::vector<double> errors;
  bool ok = true;
  std::ostringstream m;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    ctx.Log(Fmt("reconstructing with noise %.0e", levels[i]));
    const PerturbationReport rep =
        PerturbationExperiment(recon, ctx.truth(), ctx.data(), levels[i], ctx.Seed(20 + i));
    ok = ok && rep.error <= rep.bound;
    errors.push_back(rep.error);
    m << Fmt("noise %.0e: error %.3e (bound %.3e); ", levels[i], rep.error, rep.bound);
  }
  const double slope = LogLogSlope(levels, errors);
  r.pass = ok && slope >= 0.8 && slope <= 1.2;
  m << Fmt("slope %.3f", slope);
  r.measured = m.str();
  return r;
}

CriterionResult NormBoundShape() {
  CriterionResult r{9, "piecewise-norm-shape", false, "", 0.0, 300.0};
  const SubspaceBasis m8(SubspaceSpec::Piecewise(Partition::Dyadic(3, 1)));
  const std::size_t n_max = 16384;
  const FreqOrdering ord = MakeOrdering(OrderingKind::kHyperbolic, 3, n_max);
  const Eigen::MatrixXcd C = FourierMatrix(m8, ord, n_max);
  // C is fitted on N <= 512 and the bound is then checked on every N up to
  // 16384, so the larger half is held out.
  const double M2 = 64.0;
  auto shape = [&](std::size_t N) {
    const double ln = std::log(static_cast<double>(N));
    return ln * ln / std::sqrt(static_cast<double>(N)) * M2;
  };
  std::vector<std::size_t> Ns;
  for (std::size_t N = 8; N <= n_max; N *= 2) {
    Ns.push_back(N);
    if (N * 3 / 2 <= n_max) Ns.push_back(N * 3 / 2);
  }
  double c_fit = 0.0;
  std::vector<double> norms;
  for (std::size_t N : Ns) {
    norms.push_back(BalancingNormFromMatrix(C, N));
    if (N <= 512) c_fit = std::max(c_fit, norms.back() / shape(N));
  }
  // The fitting points meet the bound with equality; 1e-12 absorbs the
  // round-off of dividing and multiplying back.
  bool holds = true;
  double worst_ratio = 0.0, held_out_ratio = 0.0;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    const double ratio = norms[i] / (c_fit * shape(Ns[i]));
    worst_ratio = std::max(worst_ratio, ratio);
    if (Ns[i] > 512) held_out_ratio = std::max(held_out_ratio, ratio);
    holds = holds && ratio <= 1.0 + 1e-12;
  }
  std::vector<std::size_t> stars;
  for (const std::vector<int>& per_axis :
       {std::vector<int>{2, 1, 1}, std::vector<int>{2, 2, 1}, std::vector<int>{2, 2, 2}}) {
    const SubspaceBasis b(SubspaceSpec::Piecewise(Partition::Uniform(per_axis)));
    stars.push_back(ChooseN(b, OrderingKind::kHyperbolic, 0.25, 20000));
  }
  const bool monotone = stars[0] <= stars[1] && stars[1] <= stars[2];
  r.pass = holds && monotone;
  r.measured = Fmt("C = %.4g fitted on N <= 512; max norm/bound over %zu N in [8, %zu] = %.3f "
                   "(N > 512: %.3f); N*(M=2,4,8) = %zu, %zu, %zu",
                   c_fit, Ns.size(), n_max, worst_ratio, held_out_ratio, stars[0], stars[1],
                   stars[2]);
  return r;
}

CriterionResult LiouvilleClosedForm() {
  CriterionResult r{10, "liouville-closed-form", false, "", 0.0, 1.0};
  const TorusGrid grid(3, 16);
  const double a = 0.3;
  const Field sigma = Field::Sample(grid, [&](std::span<const double> x) {
    const double s = 1.0 + a * std::cos(2.0 * kPi * x[0]);
    return Complex(s * s);
  });
  const Field q = LiouvillePotential(sigma);
  const Field expected = Field::Sample(grid, [&](std::span<const double> x) {
    const double c = std::cos(2.0 * kPi * x[0]);
    return Complex(-4.0 * kPi * kPi * a * c / (1.0 + a * c));
  });
  double worst = 0.0;
  for (std::size_t i = 0; i < q.values.size(); ++i) {
    worst = std::max(worst, std::abs(q.values[i] - expected.values[i]));
  }
  r.pass = worst <= 1e-8;
  r.measured = Fmt("max nodal |q - q_exact| = %.2e", worst);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

Spectrum DenseRemainder(const Field& q, const ComplexFrequency& z) {
  const TorusGrid& grid = q.grid;
  const int d = grid.dim();
  const int n = grid.n();
  const Spectrum qhat = ForwardTransform(q);
  std::vector<std::size_t> unknowns;
  std::vector<int> m(d);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.FrequencyAt(i, m);
    if (!IsGrounded(z, m)) unknowns.push_back(i);
  }
  const Eigen::Index u = static_cast<Eigen::Index>(unknowns.size());
  Eigen::MatrixXcd D(u, u);
  Eigen::VectorXcd rhs(u);
  std::vector<int> a(d), b(d), diff(d);
  for (Eigen::Index row = 0; row < u; ++row) {
    grid.NodeAt(unknowns[row], a);  // slot indices
    grid.FrequencyAt(unknowns[row], m);
    rhs[row] = qhat.coeffs[unknowns[row]];
    for (Eigen::Index col = 0; col < u; ++col) {
      grid.NodeAt(unknowns[col], b);
      std::size_t idx = 0;
      for (int x = 0; x < d; ++x) idx = idx * n + static_cast<std::size_t>((a[x] - b[x] + n) % n);
      D(row, col) = -qhat.coeffs[idx];
    }
    D(row, row) += FaddeevSymbol(m, z.zeta1);
  }
  const Eigen::VectorXcd sol = D.partialPivLu().solve(rhs);
  Spectrum out(grid);
  for (Eigen::Index row = 0; row < u; ++row) out.coeffs[unknowns[row]] = sol[row];
  return out;
}

double TwoCellTailNorm(std::size_t N, std::size_t cutoff) {
  if (N > cutoff) throw InvalidArgument("N beyond the cutoff");
  const FreqOrdering ord = MakeOrdering(OrderingKind::kHyperbolic, 3, cutoff);
  // hat{w}_1,2(k) = sqrt 2 * integral over the half of e^{-2 pi i k_1 x_1},
  // zero unless k_2 = k_3 = 0.
  auto coefficients = [](int k) {
    const double r2 = std::sqrt(2.0);
    if (k == 0) return std::pair<Complex, Complex>(r2 / 2.0, r2 / 2.0);
    const Complex denom(0.0, 2.0 * kPi * k);
    const Complex half = std::exp(Complex(0.0, -kPi * k));
    return std::pair<Complex, Complex>(r2 * (1.0 - half) / denom, r2 * (half - 1.0) / denom);
  };
  double g11 = 0.0, g22 = 0.0;
  Complex g12 = 0.0;
  std::set<int> included;
  for (std::size_t l = 0; l < cutoff; ++l) {
    const std::span<const int> k = ord[l];
    if (k[1] != 0 || k[2] != 0) continue;
    included.insert(k[0]);
    if (l < N) continue;
    const auto [w1, w2] = coefficients(k[0]);
    g11 += std::norm(w1);
    g22 += std::norm(w2);
    g12 += std::conj(w1) * w2;
  }
  // Axis frequencies beyond the cutoff: odd k_1 contribute
  // (2 / (pi^2 k^2)) [[1, -1], [-1, 1]]; even k_1 != 0 contribute nothing.
  int K = 0;
  while (included.count(K + 1) && included.count(-(K + 1))) ++K;
  const int first_odd = K % 2 == 0 ? K + 1 : K + 2;
  // sum over odd k >= first_odd of 1/k^2 = trigamma(first_odd / 2) / 4.
  double missing = 2.0 * boost::math::trigamma(first_odd / 2.0) / 4.0;
  for (int k : included) {
    if (std::abs(k) > K && std::abs(k) % 2 == 1) missing -= 1.0 / (static_cast<double>(k) * k);
  }
  const double s = 2.0 / (kPi * kPi) * missing;
  g11 += s;
  g22 += s;
  g12 -= s;
  const double mean = 0.5 * (g11 + g22);
  const double lambda = mean + std::sqrt(0.25 * (g11 - g22) * (g11 - g22) + std::norm(g12));
  return std::sqrt(std::max(lambda, 0.0));
}

double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope needs >= 2 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<CriterionResult> Run(const Options& options) {
  std::vector<int> ids = options.subset;
  if (ids.empty()) {
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
  }
  for (int id : ids) {
    if (id < 1 || id > kCriterionCount) {
      throw InvalidArgument("unknown acceptance criterion " + std::to_string(id));
    }
  }
  if (!(options.tau_scale > 0.0)) throw InvalidArgument("tau_scale must be > 0");
  Context ctx(options);
  std::vector<CriterionResult> results;
  for (int id : ids) {
    if (options.progress != nullptr) *options.progress << "criterion " << id << "..." << std::endl;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      switch (id) {
        case 1: r = BandlimitedBalancing(); break;
        case 2: r = GramIdentity(); break;
        case 3: r = SolverOracle(ctx); break;
        case 4: r = RemainderDecayCriterion(ctx); break;
        case 5: r = BContraction(ctx); break;
        case 6: r = UniquenessCertificate(ctx); break;
        case 7: r = GlobalConvergence(ctx); break;
        case 8: r = PerturbationBound(ctx); break;
        case 9: r = NormBoundShape(); break;
        case 10: r = LiouvilleClosedForm(); break;
      }
    } catch (const Error& e) {
      r.id = id;
      r.name = "criterion-" + std::to_string(id);
      r.pass = false;
      r.measured = std::string("error: ") + e.what();
    }
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.budget_seconds > 0.0 && r.seconds > r.budget_seconds) {
      r.pass = false;
      r.measured += Fmt("; over the %.0f s budget", r.budget_seconds);
    }
    if (options.progress != nullptr) *options.progress << FormatLine(r) << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

std::string FormatLine(const CriterionResult& r) {
  return Fmt("%s %2d %-24s %s [%.1f s / %.0f s]", r.pass ? "PASS" : "FAIL", r.id,
             r.name.c_str(), r.measured.c_str(), r.seconds, r.budget_seconds);
}

void WriteJsonReport(std::ostream& out, const std::vector<CriterionResult>& results) {
  nlohmann::json j = nlohmann::json::array();
  for (const CriterionResult& r : results) {
    j.push_back({{"id", r.id},
                 {"name", r.name},
                 {"pass", r.pass},
                 {"measured", r.measured},
                 {"seconds", r.seconds},
                 {"budget_seconds", r.budget_seconds}});
  }
  out << nlohmann::json{{"criteria", j}}.dump(2) << '\n';
}

}  // namespace cgoinv::acceptance
