// Copyright 2026 The ocpshoot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace ocpshoot {

/// Base class of every error raised by the library.
class OcpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent problem/iterate dimensions or an unsupported option
/// combination (e.g. exact Hessian requested without duals).
class ConfigurationError : public OcpError {
 public:
  using OcpError::OcpError;
};

/// Unknown registry name.
class LookupError : public OcpError {
 public:
  using OcpError::OcpError;
};

/// An RK4 sub-step produced a non-finite state.
class IntegrationError : public OcpError {
 public:
  IntegrationError(int substep, const std::string& what)
      : OcpError(what), substep_(substep) {}
  int substep() const { return substep_; }

 private:
  int substep_;
};

/// Single shooting and DDP need a dynamically feasible input iterate.
class FeasibilityError : public OcpError {
 public:
  FeasibilityError(double residual, const std::string& what)
      : OcpError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// R_i + B_i^T P_{i+1} B_i is not positive definite at some stage.
class SingularStageError : public OcpError {
 public:
  SingularStageError(int stage, double min_eigenvalue, const std::string& what)
      : OcpError(what), stage_(stage), min_eigenvalue_(min_eigenvalue) {}
  int stage() const { return stage_; }
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  int stage_;
  double min_eigenvalue_;
};

/// The dense KKT matrix of a QP is rank deficient.
class RankError : public OcpError {
 public:
  RankError(long rank, long size, const std::string& what)
      : OcpError(what), rank_(rank), size_(size) {}
  long rank() const { return rank_; }
  long size() const { return size_; }

 private:
  long rank_;
  long size_;
};

/// LQR gain computation for the feasible initial guess failed.
class InitializationError : public OcpError {
 public:
  using OcpError::OcpError;
};

/// Z^T M Z is not positive definite (second-order sufficiency proxy fails).
class SoscViolation : public OcpError {
 public:
  SoscViolation(double min_eigenvalue, const std::string& what)
      : OcpError(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// The reference point handed to the solution-map analysis is not a fixed
/// point of the requested iteration.
class StaleReferenceError : public OcpError {
 public:
  StaleReferenceError(double step_norm, const std::string& what)
      : OcpError(what), step_norm_(step_norm) {}
  double step_norm() const { return step_norm_; }

 private:
  double step_norm_;
};

}  // namespace ocpshoot
