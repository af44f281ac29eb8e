// SPDX-License-Identifier: Apache-2.0
#include "common/json_io.h"

#include <algorithm>

namespace cgoinv::internal {

void CheckKeys(const Json& j, std::initializer_list<std::string_view> allowed,
               std::string_view context) {
  if (!j.is_object()) throw SchemaError(std::string(context) + ": expected an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw SchemaError(std::string(context) + ": unknown key '" + item.key() + "'");
    }
  }
}

Json ToJson(const SolverConfig& config) {
  return Json{{"method", std::string(MethodName(config.method))},
              {"tol", config.tol},
              {"max_iter", config.max_iter},
              {"restart", config.restart},
              {"resonance_delta", config.resonance_delta},
              {"nudge_factor", config.nudge_factor},
              {"max_nudges", config.max_nudges}};
}

SolverConfig SolverConfigFromJson(const Json& j) {
  constexpr std::string_view kContext = "solver";
  CheckKeys(j, {"method", "tol", "max_iter", "restart", "resonance_delta",
                "nudge_factor", "max_nudges"},
            kContext);
  SolverConfig c;
  if (j.contains("method")) {
    try {
      c.method = ParseMethod(Get<std::string>(j, "method", kContext));
    } catch (const SchemaError&) {
      throw;
    } catch (const InvalidArgument& e) {
      throw SchemaError(e.what());
    }
  }
  c.tol = GetOr(j, "tol", c.tol, kContext);
  c.max_iter = GetOr(j, "max_iter", c.max_iter, kContext);
  c.restart = GetOr(j, "restart", c.restart, kContext);
  c.resonance_delta = GetOr(j, "resonance_delta", c.resonance_delta, kContext);
  c.nudge_factor = GetOr(j, "nudge_factor", c.nudge_factor, kContext);
  c.max_nudges = GetOr(j, "max_nudges", c.max_nudges, kContext);
  try {
    c.Validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("solver: ") + e.what());
  }
  return c;
}

}  // namespace cgoinv::internal
