// SPDX-License-Identifier: Apache-2.0
//
// Run configuration shared by the command-line tools. JSON layout:
//
//   {
//     "subspace":    {"family", "d", "B", "level", "cells", "R"},
//     "grid":        {"n"},
//     "ordering":    "box" | "hyperbolic",
//     "N":           integer, or absent to use choose_N,
//     "balance":     {"threshold", "N_max"},
//     "schedule":    {"s", "tau", "p"},
//     "solver":      {"method", "tol", "max_iter", "restart",
//                     "resonance_delta", "nudge_factor", "max_nudges"},
//     "recon":       {"max_iter", "stop_tol", "projection_tol"},
//     "calibration": {"tau0", "margin", "probes", "max_doublings"},
//     "seed", "threads", "out"
//   }
//
// Every key is optional except "subspace"; unknown keys are rejected.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "cgoinv/cgo.h"
#include "cgoinv/recon.h"
#include "cgoinv/subspaces.h"
#include "cgoinv/transform.h"

namespace cgoinv {

struct RunConfig {
  SubspaceSpec subspace;
  int grid_n = 16;
  OrderingKind ordering = OrderingKind::kHyperbolic;
  std::optional<std::size_t> N;
  double threshold = 0.25;
  std::size_t N_max = 20000;
  TSchedule schedule;
  SolverConfig solver;
  ReconConfig recon;
  CalibrationOptions calibration;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out = "out";

  // R of W_R; throws SchemaError when the subspace has no radius.
  double radius() const;
};

// Throw SchemaError on malformed or inconsistent input.
SubspaceSpec ParseSubspaceSpec(const std::string& json_text);
std::string SubspaceSpecToJson(const SubspaceSpec& spec);

RunConfig ParseRunConfig(const std::string& json_text);
RunConfig LoadRunConfig(const std::string& path);
// The resolved configuration, with N filled in when known.
void WriteRunConfig(std::ostream& out, const RunConfig& config);

}  // namespace cgoinv
