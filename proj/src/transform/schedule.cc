// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <fstream>

#include "cgoinv/errors.h"
#include "cgoinv/transform.h"
#include "common/json_io.h"

namespace cgoinv {

double TSchedule::T(std::span<const int> k) const {
  double k2 = 0.0;
  for (int v : k) k2 += static_cast<double>(v) * v;
  return tau * (std::pow(std::sqrt(k2), s) + 1.0);
}

void TSchedule::Validate(int dim) const {
  if (!(tau > 0.0)) throw InvalidArgument("schedule tau must be > 0");
  if (!(s > 0.5 * dim)) throw InvalidArgument("schedule s must exceed d/2");
  if (!(p > dim && 2.0 * s * (p - dim) > dim * p)) {
    throw InvalidArgument("schedule needs s > dp / (2(p - d))");
  }
}

TSchedule TSchedule::Default(int dim) {
  TSchedule t;
  t.s = dim;
  // Smallest integer p admissible for s = d, plus one.
  t.p = std::floor(2.0 * t.s * dim / (2.0 * t.s - dim)) + 1.0;
  return t;
}

void WriteMeasurement(std::ostream& out, const MeasurementVector& y) {
  internal::Json values = internal::Json::array();
  for (const Complex& v : y.values) values.push_back({v.real(), v.imag()});
  internal::Json j{{"N", y.N},
                   {"ordering", std::string(OrderingName(y.ordering))},
                   {"s", y.schedule.s},
                   {"tau", y.schedule.tau},
                   {"p", y.schedule.p},
                   {"grid_n", y.grid_n},
                   {"solver", internal::ToJson(y.solver)},
                   {"values", values}};
  out << j.dump(1) << '\n';
}

MeasurementVector ReadMeasurement(std::istream& in) {
  constexpr std::string_view kContext = "measurement";
  internal::Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("measurement: ") + e.what());
  }
  internal::CheckKeys(j, {"N", "ordering", "s", "tau", "p", "grid_n", "solver", "values"},
                      kContext);
  MeasurementVector y;
  y.N = internal::Get<std::size_t>(j, "N", kContext);
  try {
    y.ordering = ParseOrderingKind(internal::Get<std::string>(j, "ordering", kContext));
  } catch (const SchemaError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw SchemaError(e.what());
  }
  y.schedule.s = internal::Get<double>(j, "s", kContext);
  y.schedule.tau = internal::Get<double>(j, "tau", kContext);
  y.schedule.p = internal::GetOr(j, "p", y.schedule.p, kContext);
  y.grid_n = internal::GetOr(j, "grid_n", 0, kContext);
  y.solver = j.contains("solver") ? internal::SolverConfigFromJson(j["solver"])
                                  : SolverConfig{};
  const auto raw = internal::Get<std::vector<std::vector<double>>>(j, "values", kContext);
  for (const auto& pair : raw) {
    if (pair.size() != 2) throw SchemaError("measurement: values must be [re, im] pairs");
    y.values.emplace_back(pair[0], pair[1]);
  }
  if (y.N < 1 || y.values.size() != y.N) {
    throw SchemaError("measurement: N must be >= 1 and match the value count");
  }
  return y;
}

void WriteMeasurementFile(const std::string& path, const MeasurementVector& y) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path + " for writing");
  WriteMeasurement(out, y);
  if (!out) throw InvalidArgument("write to " + path + " failed");
}

MeasurementVector ReadMeasurementFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return ReadMeasurement(in);
}

}  // namespace cgoinv
