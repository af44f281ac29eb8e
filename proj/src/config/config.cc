// SPDX-License-Identifier: Apache-2.0
#include "cgoinv/config.h"

#include <fstream>
#include <ostream>
#include <sstream>

#include "cgoinv/errors.h"
#include "common/json_io.h"

namespace cgoinv {
namespace {

using internal::CheckKeys;
using internal::Get;
using internal::GetOr;
using internal::Json;

Json Parse(const std::string& text, std::string_view context) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string(context) + ": " + e.what());
  }
}

// Runs f, turning InvalidArgument from the domain constructors into
// SchemaError.
template <typename F>
auto AsSchema(std::string_view context, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string(context) + ": " + e.what());
  }
}

SubspaceSpec SubspaceFromJson(const Json& j) {
  constexpr std::string_view kContext = "subspace";
  CheckKeys(j, {"family", "d", "B", "level", "cells", "R"}, kContext);
  const Family family = AsSchema(kContext, [&] {
    return ParseFamily(Get<std::string>(j, "family", kContext));
  });
  const int d = GetOr(j, "d", 3, kContext);
  SubspaceSpec spec = AsSchema(kContext, [&]() -> SubspaceSpec {
    switch (family) {
      case Family::kBandlimited:
        return SubspaceSpec::Bandlimited(d, Get<int>(j, "B", kContext));
      case Family::kHaar:
        return SubspaceSpec::Haar(d, Get<int>(j, "level", kContext));
      case Family::kPiecewise:
        break;
    }
    if (!j.contains("cells")) {
      return SubspaceSpec::Piecewise(Partition::Dyadic(d, Get<int>(j, "level", kContext)));
    }
    Partition p;
    p.dim = d;
    const Json& cells = j["cells"];
    if (!cells.is_array() || cells.empty()) throw SchemaError("subspace: cells must be a non-empty array");
    for (const Json& c : cells) {
      CheckKeys(c, {"corner", "sides"}, "subspace cell");
      Cell cell{Get<std::vector<double>>(c, "corner", "subspace cell"),
                Get<std::vector<double>>(c, "sides", "subspace cell")};
      if (static_cast<int>(cell.corner.size()) != d || static_cast<int>(cell.sides.size()) != d) {
        throw SchemaError("subspace: cell dimension differs from d");
      }
      p.cells.push_back(std::move(cell));
    }
    p.Validate();
    return SubspaceSpec::Piecewise(std::move(p));
  });
  if (j.contains("R")) {
    const double R = Get<double>(j, "R", kContext);
    if (!(R > 0.0)) throw SchemaError("subspace: R must be > 0");
    spec.radius = R;
  }
  return spec;
}

Json SubspaceToJson(const SubspaceSpec& spec) {
  Json j{{"family", std::string(FamilyName(spec.family))}, {"d", spec.dim}};
  switch (spec.family) {
    case Family::kBandlimited:
      j["B"] = spec.bandwidth;
      break;
    case Family::kHaar:
      j["level"] = spec.level;
      break;
    case Family::kPiecewise: {
      Json cells = Json::array();
      for (const Cell& c : spec.partition.cells) {
        cells.push_back({{"corner", c.corner}, {"sides", c.sides}});
      }
      j["cells"] = cells;
      break;
    }
  }
  if (spec.radius) j["R"] = *spec.radius;
  return j;
}

}  // namespace

double RunConfig::radius() const {
  if (!subspace.radius) throw SchemaError("subspace: R is required for this command");
  return *subspace.radius;
}

SubspaceSpec ParseSubspaceSpec(const std::string& json_text) {
  return SubspaceFromJson(Parse(json_text, "subspace"));
}

std::string SubspaceSpecToJson(const SubspaceSpec& spec) {
  return SubspaceToJson(spec).dump(2);
}

RunConfig ParseRunConfig(const std::string& json_text) {
  constexpr std::string_view kContext = "config";
  const Json j = Parse(json_text, kContext);
  CheckKeys(j, {"subspace", "grid", "ordering", "N", "balance", "schedule", "solver",
                "recon", "calibration", "seed", "threads", "out"},
            kContext);
  RunConfig c;
  if (!j.contains("subspace")) throw SchemaError("config: missing key 'subspace'");
  c.subspace = SubspaceFromJson(j["subspace"]);
  c.schedule = TSchedule::Default(c.subspace.dim);

  if (j.contains("grid")) {
    CheckKeys(j["grid"], {"n"}, "grid");
    c.grid_n = Get<int>(j["grid"], "n", "grid");
    AsSchema("grid", [&] { return TorusGrid(c.subspace.dim, c.grid_n).size(); });
  }
  if (j.contains("ordering")) {
    c.ordering = AsSchema(kContext, [&] {
      return ParseOrderingKind(Get<std::string>(j, "ordering", kContext));
    });
  }
  if (j.contains("N") && !j["N"].is_null()) {
    const auto N = Get<std::int64_t>(j, "N", kContext);
    if (N < 1) throw SchemaError("config: N must be >= 1");
    c.N = static_cast<std::size_t>(N);
  }
  if (j.contains("balance")) {
    const Json& b = j["balance"];
    CheckKeys(b, {"threshold", "N_max"}, "balance");
    c.threshold = GetOr(b, "threshold", c.threshold, "balance");
    c.N_max = GetOr(b, "N_max", c.N_max, "balance");
    if (!(c.threshold > 0.0 && c.threshold <= 1.0) || c.N_max < 1) {
      throw SchemaError("balance: need 0 < threshold <= 1 and N_max >= 1");
    }
  }
  if (j.contains("schedule")) {
    const Json& s = j["schedule"];
    CheckKeys(s, {"s", "tau", "p"}, "schedule");
    c.schedule.s = GetOr(s, "s", c.schedule.s, "schedule");
    c.schedule.tau = GetOr(s, "tau", c.schedule.tau, "schedule");
    c.schedule.p = GetOr(s, "p", c.schedule.p, "schedule");
  }
  AsSchema("schedule", [&] {
    c.schedule.Validate(c.subspace.dim);
    return 0;
  });
  if (j.contains("solver")) c.solver = internal::SolverConfigFromJson(j["solver"]);
  if (j.contains("recon")) {
    const Json& r = j["recon"];
    CheckKeys(r, {"max_iter", "stop_tol", "projection_tol"}, "recon");
    c.recon.max_iter = GetOr(r, "max_iter", c.recon.max_iter, "recon");
    c.recon.stop_tol = GetOr(r, "stop_tol", c.recon.stop_tol, "recon");
    c.recon.projection_tol = GetOr(r, "projection_tol", c.recon.projection_tol, "recon");
    AsSchema("recon", [&] {
      c.recon.Validate();
      return 0;
    });
  }
  if (j.contains("calibration")) {
    const Json& k = j["calibration"];
    CheckKeys(k, {"tau0", "margin", "probes", "max_doublings"}, "calibration");
    c.calibration.tau0 = GetOr(k, "tau0", c.calibration.tau0, "calibration");
    c.calibration.margin = GetOr(k, "margin", c.calibration.margin, "calibration");
    c.calibration.probes = GetOr(k, "probes", c.calibration.probes, "calibration");
    c.calibration.max_doublings =
        GetOr(k, "max_doublings", c.calibration.max_doublings, "calibration");
    if (!(c.calibration.tau0 > 0.0) || c.calibration.probes < 10 ||
        !(c.calibration.margin >= 0.0 && c.calibration.margin < 0.5) ||
        c.calibration.max_doublings < 0) {
      throw SchemaError("calibration: need tau0 > 0, probes >= 10, 0 <= margin < 1/2");
    }
  }
  c.seed = GetOr<std::uint64_t>(j, "seed", c.seed, kContext);
  c.threads = GetOr(j, "threads", c.threads, kContext);
  c.out = GetOr<std::string>(j, "out", c.out, kContext);
  return c;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseRunConfig(text.str());
}

void WriteRunConfig(std::ostream& out, const RunConfig& c) {
  Json j{{"subspace", SubspaceToJson(c.subspace)},
         {"grid", {{"n", c.grid_n}}},
         {"ordering", std::string(OrderingName(c.ordering))},
         {"balance", {{"threshold", c.threshold}, {"N_max", c.N_max}}},
         {"schedule", {{"s", c.schedule.s}, {"tau", c.schedule.tau}, {"p", c.schedule.p}}},
         {"solver", internal::ToJson(c.solver)},
         {"recon",
          {{"max_iter", c.recon.max_iter},
           {"stop_tol", c.recon.stop_tol},
           {"projection_tol", c.recon.projection_tol}}},
         {"calibration",
          {{"tau0", c.calibration.tau0},
           {"margin", c.calibration.margin},
           {"probes", c.calibration.probes},
           {"max_doublings", c.calibration.max_doublings}}},
         {"seed", c.seed},
         {"threads", c.threads},
         {"out", c.out}};
  if (c.N) j["N"] = *c.N;
  out << j.dump(2) << '\n';
}

}  // namespace cgoinv
