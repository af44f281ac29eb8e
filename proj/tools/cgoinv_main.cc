// SPDX-License-Identifier: Apache-2.0
//
// cgoinv: balance | simulate | reconstruct | calibrate | verify.
//
// Exit codes: 0 success, 1 other failure (or a failed verify criterion),
// 2 schema error, 3 search error, 4 solver error, 5 provenance mismatch.
#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "cgoinv/acceptance.h"
#include "cgoinv/config.h"
#include "cgoinv/errors.h"
#include "cgoinv/parallel.h"
#include "cgoinv/recon.h"
#include "cgoinv/transform.h"

namespace fs = std::filesystem;
using namespace cgoinv;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

RunConfig Resolve(const Common& common, bool required = true) {
  RunConfig c;
  if (!common.config_path.empty()) {
    c = LoadRunConfig(common.config_path);
  } else if (required) {
    throw SchemaError("--config is required");
  }
  if (common.seed) c.seed = *common.seed;
  if (common.threads) c.threads = *common.threads;
  if (common.out) c.out = *common.out;
  if (c.threads > 0) SetDefaultThreads(c.threads);
  c.calibration.seed = c.seed;
  c.calibration.threads = c.threads;
  fs::create_directories(c.out);
  return c;
}

std::string OutPath(const RunConfig& c, const std::string& name) {
  return (fs::path(c.out) / name).string();
}

void WriteResolved(const RunConfig& c) {
  std::ofstream out(OutPath(c, "config.json"));
  WriteRunConfig(out, c);
}

std::ofstream OpenOut(const RunConfig& c, const std::string& name) {
  std::ofstream out(OutPath(c, name));
  if (!out) throw Error("cannot write " + OutPath(c, name));
  out.precision(17);
  return out;
}

std::size_t ResolveN(RunConfig& c, const SubspaceBasis& basis) {
  if (!c.N) c.N = ChooseN(basis, c.ordering, c.threshold, c.N_max);
  return *c.N;
}

// ---------------------------------------------------------------------------

int Balance(const Common& common) {
  RunConfig c = Resolve(common);
  const SubspaceBasis basis(c.subspace);
  const std::size_t n_star = ChooseN(basis, c.ordering, c.threshold, c.N_max);
  const std::size_t rows = std::min(c.N_max, std::max<std::size_t>(2 * n_star, n_star + 8));
  const FreqOrdering ord = MakeOrdering(c.ordering, basis.dim(), rows);
  const Eigen::MatrixXcd C = FourierMatrix(basis, ord, rows);
  const Eigen::Index M = C.cols();

  std::vector<double> norms{1.0};
  Eigen::MatrixXcd tail = Eigen::MatrixXcd::Identity(M, M);
  for (std::size_t N = 1; N <= rows; ++N) {
    const auto row = C.row(static_cast<Eigen::Index>(N - 1));
    tail -= row.adjoint() * row;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(tail, Eigen::EigenvaluesOnly);
    norms.push_back(std::sqrt(std::clamp(eig.eigenvalues().maxCoeff(), 0.0, 1.0)));
  }

  const bool piecewise = basis.is_piecewise();
  const double m2 = static_cast<double>(M) * static_cast<double>(M);
  auto shape = [&](std::size_t N) {
    const double ln = std::log(static_cast<double>(N));
    return std::pow(ln, basis.dim() - 1) / std::sqrt(static_cast<double>(N)) * m2;
  };
  double c_fit = 0.0;
  if (piecewise) {
    for (std::size_t N = 2; N <= rows; ++N) c_fit = std::max(c_fit, norms[N] / shape(N));
  }

  std::ofstream csv = OpenOut(c, "balance.csv");
  csv << "N,balancing_norm" << (piecewise ? ",fitted_bound" : "") << '\n';
  for (std::size_t N = 0; N <= rows; ++N) {
    csv << N << ',' << norms[N];
    if (piecewise) {
      csv << ',';
      if (N >= 2) csv << c_fit * shape(N);
    }
    csv << '\n';
  }
  nlohmann::json report{{"N_star", n_star},
                        {"threshold", c.threshold},
                        {"norm_at_N_star", norms[n_star]},
                        {"dim_W", M},
                        {"ordering", std::string(OrderingName(c.ordering))}};
  if (piecewise) report["fitted_C"] = c_fit;
  OpenOut(c, "balance.json") << report.dump(2) << '\n';
  c.N = n_star;
  WriteResolved(c);
  std::cout << "N* = " << n_star << " (balancing norm " << norms[n_star] << ")\n";
  return 0;
}

// Coefficients of a field read from disk: must be an element of W_R.
std::vector<Complex> LoadPotential(const std::string& path, const SubspaceBasis& basis,
                                   const BoxConstraint& box) {
  const Field q = ReadFieldFile(path);
  if (!(q.grid == basis.grid())) throw SchemaError(path + ": grid differs from the config");
  if (MaxImagAbs(q) > 1e-12 * std::max(1.0, SupNorm(q))) {
    throw SchemaError(path + ": potential must be real");
  }
  if (SupNorm(q) > box.R * (1.0 + 1e-12)) {
    throw SchemaError(path + ": potential exceeds the bound R");
  }
  try {
    return CoefficientsInW(q, basis);
  } catch (const InvalidArgument& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

int Simulate(const Common& common, const std::string& q_path) {
  RunConfig c = Resolve(common);
  const BoxConstraint box(c.radius());
  const TorusGrid grid(c.subspace.dim, c.grid_n);
  const SubspaceBasis basis(c.subspace, grid);
  const std::vector<Complex> coeffs = q_path.empty() ? RandomCoefficients(basis, box, c.seed)
                                                     : LoadPotential(q_path, basis, box);
  const std::size_t N = ResolveN(c, basis);
  const FreqOrdering ord = MakeOrdering(c.ordering, basis.dim(), N);
  const MeasurementOperator op(basis, ord, c.schedule, c.solver, N, c.threads);
  const MeasurementVector y = op.Measure(coeffs);
  WriteMeasurementFile(OutPath(c, "measurement.json"), y);
  WriteFieldFile(OutPath(c, "truth.cgo1"), basis.Synthesize(coeffs));
  WriteResolved(c);
  std::cout << "wrote " << N << " measurements to " << OutPath(c, "measurement.json") << '\n';
  return 0;
}

int Reconstruct(const Common& common, const std::string& y_path, const std::string& q0_path,
                const std::string& truth_path) {
  RunConfig c = Resolve(common);
  const BoxConstraint box(c.radius());
  const TorusGrid grid(c.subspace.dim, c.grid_n);
  const SubspaceBasis basis(c.subspace, grid);
  const MeasurementVector y = ReadMeasurementFile(y_path);
  if (!c.N) c.N = y.N;
  const FreqOrdering ord = MakeOrdering(c.ordering, basis.dim(), *c.N);
  const MeasurementOperator op(basis, ord, c.schedule, c.solver, *c.N, c.threads);
  CheckProvenance(y, op);
  const Reconstructor recon(op, box, c.recon);

  std::vector<Complex> q0(basis.size(), 0.0);
  if (!q0_path.empty()) q0 = basis.Analyze(ReadFieldFile(q0_path));
  std::optional<std::vector<Complex>> truth;
  if (!truth_path.empty()) truth = LoadPotential(truth_path, basis, box);

  const ReconResult result = recon.Reconstruct(y, q0, truth ? &*truth : nullptr);
  WriteFieldFile(OutPath(c, "reconstruction.cgo1"), basis.Synthesize(result.coefficients));
  std::ofstream log = OpenOut(c, "iterations.csv");
  result.log.WriteCsv(log);
  WriteResolved(c);
  if (!result.converged) {
    std::cerr << "warning: no convergence within " << c.recon.max_iter
              << " iterations; returning the last iterate\n";
  }
  std::cout << "iterations: " << result.iterations << (result.converged ? "" : " (not converged)")
            << '\n';
  if (truth) {
    const double error = result.log.records.back().true_error.value_or(NAN);
    const bool envelope = result.log.EnvelopeHolds();
    const bool pass = envelope && result.converged && error <= 1e-6;
    std::cout << "verdict: " << (pass ? "PASS" : "FAIL") << " (envelope "
              << (envelope ? "holds" : "violated") << ", final error " << error << ")\n";
  }
  return 0;
}

int Calibrate(const Common& common) {
  RunConfig c = Resolve(common);
  const BoxConstraint box(c.radius());
  const TorusGrid grid(c.subspace.dim, c.grid_n);
  const SubspaceBasis basis(c.subspace, grid);
  const std::size_t N = ResolveN(c, basis);
  const FreqOrdering ord = MakeOrdering(c.ordering, basis.dim(), N);
  const CalibrationResult result =
      CalibrateTau(basis, box, ord, c.schedule, c.solver, N, c.calibration);
  nlohmann::json history = nlohmann::json::array();
  for (const CalibrationStep& s : result.history) {
    history.push_back({{"tau", s.tau}, {"ratio", s.ratio}, {"evaluations", s.evaluations}});
  }
  OpenOut(c, "calibration.json")
      << nlohmann::json{{"tau", result.schedule.tau}, {"ratio", result.ratio},
                        {"N", N}, {"history", history}}
             .dump(2)
      << '\n';
  c.schedule = result.schedule;
  WriteResolved(c);
  std::cout << "tau = " << result.schedule.tau << " (ratio " << result.ratio << ")\n";
  return 0;
}

int Verify(const Common& common, const std::vector<int>& subset, double tau_scale) {
  RunConfig c = Resolve(common, /*required=*/false);
  acceptance::Options options;
  options.subset = subset;
  options.tau_scale = tau_scale;
  options.threads = c.threads;
  options.seed = c.seed == 0 ? 1 : c.seed;
  options.progress = &std::cerr;
  const auto results = acceptance::Run(options);
  bool all = true;
  for (const auto& r : results) {
    std::cout << acceptance::FormatLine(r) << '\n';
    all = all && r.pass;
  }
  std::ofstream report = OpenOut(c, "verify.json");
  acceptance::WriteJsonReport(report, results);
  WriteResolved(c);
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-point reconstruction of Schrodinger potentials from CGO scattering data"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", common.config_path, "run configuration (JSON)");
    if (config_required) opt->required();
    sub->add_option("--seed", common.seed, "random seed (overrides the config)");
    sub->add_option("--threads", common.threads, "worker threads (overrides the config)");
    sub->add_option("--out", common.out, "output directory (overrides the config)");
  };

  auto* balance = app.add_subcommand("balance", "balancing norm curve and N*");
  add_common(balance, true);

  std::string q_path;
  auto* simulate = app.add_subcommand("simulate", "simulate P_N U(q)");
  add_common(simulate, true);
  simulate->add_option("--q", q_path, "potential (CGO1); default: random from --seed");

  std::string y_path, q0_path, truth_path;
  auto* reconstruct = app.add_subcommand("reconstruct", "fixed-point reconstruction");
  add_common(reconstruct, true);
  reconstruct->add_option("--y", y_path, "measurement JSON")->required();
  reconstruct->add_option("--q0", q0_path, "initial guess (CGO1); default 0");
  reconstruct->add_option("--truth", truth_path, "true potential (CGO1) for the verdict");

  auto* calibrate = app.add_subcommand("calibrate", "calibrate tau of the t schedule");
  add_common(calibrate, true);

  std::vector<int> subset;
  double tau_scale = 1.0;
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  add_common(verify, false);
  verify->add_option("--subset", subset, "criteria to run, e.g. 1,2,10")->delimiter(',');
  verify->add_option("--tau-scale", tau_scale, "multiply the calibrated tau");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*balance) return Balance(common);
    if (*simulate) return Simulate(common, q_path);
    if (*reconstruct) return Reconstruct(common, y_path, q0_path, truth_path);
    if (*calibrate) return Calibrate(common);
    if (*verify) return Verify(common, subset, tau_scale);
  } catch (const ProvenanceError& e) {
    std::cerr << "provenance error: " << e.what() << '\n';
    return 5;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return 2;
  } catch (const SearchError& e) {
    std::cerr << "search error: " << e.what() << '\n';
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
