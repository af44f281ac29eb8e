// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "cgoinv/config.h"
#include "cgoinv/errors.h"

namespace cgoinv {
namespace {

constexpr const char* kMinimal = R"({"subspace": {"family": "bandlimited", "B": 1}})";

std::string WithKey(const std::string& extra) {
  return R"({"subspace": {"family": "piecewise", "level": 1, "R": 5}, )" + extra + "}";
}

TEST(RunConfigTest, MinimalUsesDefaults) {
  const RunConfig c = ParseRunConfig(kMinimal);
  EXPECT_EQ(c.subspace.family, Family::kBandlimited);
  EXPECT_EQ(c.subspace.dim, 3);
  EXPECT_EQ(c.subspace.bandwidth, 1);
  EXPECT_EQ(c.grid_n, 16);
  EXPECT_EQ(c.ordering, OrderingKind::kHyperbolic);
  EXPECT_FALSE(c.N.has_value());
  EXPECT_EQ(c.threshold, 0.25);
  EXPECT_EQ(c.schedule.s, TSchedule::Default(3).s);
  EXPECT_EQ(c.schedule.tau, 1.0);
  EXPECT_EQ(c.solver.method, SolverMethod::kKrylov);
  EXPECT_EQ(c.recon.max_iter, 60);
  EXPECT_EQ(c.calibration.probes, 10);
  EXPECT_EQ(c.seed, 0u);
  EXPECT_EQ(c.out, "out");
  EXPECT_THROW(c.radius(), SchemaError);
}

TEST(RunConfigTest, FullConfigRoundTrips) {
  const std::string text = R"({
    "subspace": {"family": "piecewise", "d": 3, "level": 1, "R": 5},
    "grid": {"n": 8},
    "ordering": "box",
    "N": 123,
    "balance": {"threshold": 0.5, "N_max": 999},
    "schedule": {"s": 4, "tau": 12.8, "p": 8},
    "solver": {"method": "neumann", "tol": 1e-9, "max_iter": 50, "restart": 10},
    "recon": {"max_iter": 30, "stop_tol": 1e-9, "projection_tol": 1e-11},
    "calibration": {"tau0": 0.2, "margin": 0.1, "probes": 12, "max_doublings": 5},
    "seed": 18446744073709551615,
    "threads": 2,
    "out": "runs/a"
  })";
  const RunConfig c = ParseRunConfig(text);
  EXPECT_EQ(c.subspace.partition.size(), 8u);
  EXPECT_EQ(c.radius(), 5.0);
  EXPECT_EQ(c.grid_n, 8);
  EXPECT_EQ(c.ordering, OrderingKind::kBox);
  EXPECT_EQ(*c.N, 123u);
  EXPECT_EQ(c.N_max, 999u);
  EXPECT_EQ(c.schedule.tau, 12.8);
  EXPECT_EQ(c.solver.method, SolverMethod::kNeumann);
  EXPECT_EQ(c.solver.restart, 10);
  EXPECT_EQ(c.recon.stop_tol, 1e-9);
  EXPECT_EQ(c.calibration.max_doublings, 5);
  EXPECT_EQ(c.seed, 18446744073709551615ull);
  EXPECT_EQ(c.threads, 2);
  EXPECT_EQ(c.out, "runs/a");

  std::ostringstream once, twice;
  WriteRunConfig(once, c);
  WriteRunConfig(twice, ParseRunConfig(once.str()));
  EXPECT_EQ(once.str(), twice.str());
}

TEST(RunConfigTest, UnknownKeysRejected) {
  EXPECT_THROW(ParseRunConfig(WithKey(R"("extra": 1)")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("grid": {"n": 8, "m": 2})")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("schedule": {"t": 1})")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("solver": {"tolerance": 1e-9})")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("recon": {"maxiter": 3})")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("balance": {"thresh": 0.2})")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("calibration": {"tau": 1})")), SchemaError);
  EXPECT_THROW(ParseRunConfig(R"({"subspace": {"family": "haar", "level": 1, "M": 8}})"),
               SchemaError);
}

TEST(RunConfigTest, MalformedInput) {
  EXPECT_THROW(ParseRunConfig("{"), SchemaError);
  EXPECT_THROW(ParseRunConfig("[1, 2]"), SchemaError);
  EXPECT_THROW(ParseRunConfig("{}"), SchemaError);
  EXPECT_THROW(ParseRunConfig(R"({"subspace": {"family": "wavelets"}})"), SchemaError);
  EXPECT_THROW(ParseRunConfig(R"({"subspace": {"family": "bandlimited"}})"), SchemaError);
  EXPECT_THROW(ParseRunConfig(R"({"subspace": {"family": "bandlimited", "B": "one"}})"),
               SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("N": 0)")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("N": 2.5)")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("ordering": "spiral")")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("grid": {"n": 0})")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("seed": -1)")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("out": 3)")), SchemaError);
  EXPECT_THROW(ParseRunConfig(R"({"subspace": {"family": "piecewise", "level": 1, "R": 0}})"),
               SchemaError);
}

TEST(RunConfigTest, InconsistentValues) {
  EXPECT_THROW(ParseRunConfig(WithKey(R"("balance": {"threshold": 1.5})")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("recon": {"max_iter": 0})")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("calibration": {"probes": 9})")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("calibration": {"margin": 0.5})")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("schedule": {"tau": 0})")), SchemaError);
  // 2 s (1 - d/p) must exceed d.
  EXPECT_THROW(ParseRunConfig(WithKey(R"("schedule": {"s": 2, "p": 4})")), SchemaError);
  EXPECT_THROW(ParseRunConfig(WithKey(R"("solver": {"tol": 0})")), SchemaError);
}

TEST(RunConfigTest, LoadMissingFile) {
  EXPECT_THROW(LoadRunConfig("/nonexistent/config.json"), SchemaError);
}

TEST(SubspaceSpecTest, ExplicitCells) {
  const SubspaceSpec spec = ParseSubspaceSpec(R"({"family": "piecewise", "d": 2, "cells": [
      {"corner": [0, 0], "sides": [0.5, 1]},
      {"corner": [0.5, 0], "sides": [0.5, 1]}]})");
  EXPECT_EQ(spec.dim, 2);
  ASSERT_EQ(spec.partition.size(), 2u);
  EXPECT_EQ(spec.partition.cells[1].corner[0], 0.5);
  EXPECT_EQ(ParseSubspaceSpec(SubspaceSpecToJson(spec)).partition.cells[1].sides[1], 1.0);

  EXPECT_THROW(ParseSubspaceSpec(R"({"family": "piecewise", "d": 2, "cells": []})"),
               SchemaError);
  EXPECT_THROW(ParseSubspaceSpec(
                   R"({"family": "piecewise", "d": 2, "cells": [{"corner": [0], "sides": [1]}]})"),
               SchemaError);
  // Overlapping cells.
  EXPECT_THROW(ParseSubspaceSpec(R"({"family": "piecewise", "d": 1, "cells": [
      {"corner": [0], "sides": [0.6]}, {"corner": [0.5], "sides": [0.5]}]})"),
               SchemaError);
  EXPECT_THROW(ParseSubspaceSpec(R"({"family": "piecewise", "d": 1, "cells": [
      {"corner": [0], "sides": [1], "value": 2}]})"),
               SchemaError);
}

TEST(SubspaceSpecTest, FamiliesRoundTrip) {
  for (const char* text : {R"({"family": "bandlimited", "d": 2, "B": 3, "R": 1.5})",
                           R"({"family": "haar", "d": 3, "level": 2})",
                           R"({"family": "piecewise", "d": 3, "level": 1})"}) {
    const std::string once = SubspaceSpecToJson(ParseSubspaceSpec(text));
    EXPECT_EQ(SubspaceSpecToJson(ParseSubspaceSpec(once)), once) << text;
  }
}

}  // namespace
}  // namespace cgoinv
