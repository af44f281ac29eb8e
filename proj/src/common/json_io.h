// SPDX-License-Identifier: Apache-2.0
//
// JSON helpers shared by the file formats and the run configuration.
#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>

#include "cgoinv/cgo.h"
#include "cgoinv/errors.h"

namespace cgoinv::internal {

using Json = nlohmann::json;

// Throws SchemaError unless j is an object whose keys are all in `allowed`.
void CheckKeys(const Json& j, std::initializer_list<std::string_view> allowed,
               std::string_view context);

// Typed access with SchemaError on a missing key or a wrong type.
template <typename T>
T Get(const Json& j, std::string_view key, std::string_view context) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) {
    throw SchemaError(std::string(context) + ": missing key '" + std::string(key) + "'");
  }
  if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    // nlohmann converts 2.5 and -1 silently; a schema should not.
    const std::string where = std::string(context) + ": '" + std::string(key) + "'";
    if (std::is_unsigned_v<T> ? !it->is_number_unsigned() : !it->is_number_integer()) {
      throw SchemaError(where + (std::is_unsigned_v<T> ? " must be a non-negative integer"
                                                       : " must be an integer"));
    }
    if (it->is_number_unsigned()) {
      if (it->get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) {
        throw SchemaError(where + " out of range");
      }
    } else if (it->get<std::int64_t>() < static_cast<std::int64_t>(std::numeric_limits<T>::min())) {
      throw SchemaError(where + " out of range");
    }
  }
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(std::string(context) + ": bad type for '" + std::string(key) + "'");
  }
}

template <typename T>
T GetOr(const Json& j, std::string_view key, T fallback, std::string_view context) {
  if (!j.contains(std::string(key))) return fallback;
  return Get<T>(j, key, context);
}

Json ToJson(const SolverConfig& config);
// Missing keys keep their defaults; unknown keys are rejected.
SolverConfig SolverConfigFromJson(const Json& j);

}  // namespace cgoinv::internal
