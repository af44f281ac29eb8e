// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cgoinv {

// All library failures derive from Error. The intermediate classes group
// failures by how a caller is expected to react (see tools/ exit codes).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: violated preconditions, malformed files, schema problems.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SchemaError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class FormatError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DimensionError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DivergentSeriesError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class MisalignedPartitionError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class BandwidthError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class PositivityError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A measurement frequency does not fit in the grid's frequency box.
class FrequencyOutOfBand : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Measurement provenance does not match the reconstruction configuration.
class ProvenanceError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Numerical failures of the remainder solver and its guard.
class SolverError : public Error {
 public:
  using Error::Error;
};

class ResonanceGuardError : public SolverError {
 public:
  using SolverError::SolverError;
};

class SolverDivergenceError : public SolverError {
 public:
  using SolverError::SolverError;
};

class IterationCapError : public SolverError {
 public:
  using SolverError::SolverError;
};

// Dykstra projection onto W_R did not settle.
class ProjectionError : public SolverError {
 public:
  using SolverError::SolverError;
};

// Searches that ran out of room (choose_N, calibrate_tau).
class SearchError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public SearchError {
 public:
  NotFoundError(const std::string& what, double norm_at_max)
      : SearchError(what), norm_at_max_(norm_at_max) {}
  double norm_at_max() const { return norm_at_max_; }

 private:
  double norm_at_max_;
};

class CalibrationError : public SearchError {
 public:
  using SearchError::SearchError;
};

}  // namespace cgoinv
