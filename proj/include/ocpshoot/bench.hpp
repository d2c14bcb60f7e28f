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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ocpshoot/contraction.hpp"
#include "ocpshoot/registry.hpp"
#include "ocpshoot/solvers.hpp"

namespace ocpshoot::bench {

enum class InitialGuess { Lqr, NearSolution };
enum class Figure { Fig1, Fig2, Fig3 };

struct RunConfig {
  // Registry name, or path to a JSON file describing an lti-toy instance.
  std::string problem = "chen1998";
  std::vector<Method> methods{Method::MultipleShooting};
  std::vector<HessianMode> modes{HessianMode::GGN};
  double step_tol = 1e-12;
  int max_iters = 200;
  LineSearch line_search = FullStep{};
  std::optional<VectorXd> x0;
  std::optional<int> horizon;
  double cost_scale = 1.0;
  // Unset means the command's default: LQR for solve, near-solution for the
  // rate experiments.
  std::optional<InitialGuess> init;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;

  void validate() const;
  SolverConfig solver_config(Method method, HessianMode mode) const;
};

/// Problem named by cfg.problem with the horizon, x0 and cost-scale overrides.
OcpProblem build_problem(const RunConfig& cfg);

/// Parses an inline lti-toy description:
///   {"family": "lti-toy", "A": [[...]], "B": [[...]], "Q": ..., "R": ...,
///    "P": ..., "x0": [...], "horizon": N}
/// A and B are required, the rest default to the built-in lti-toy weights.
LtiSpec parse_lti_spec(const std::string& json_text);

std::vector<std::string> cmd_list_problems();

struct RunSummary {
  Method method;
  HessianMode mode;
  Termination termination;
  int iterations = 0;
  double final_step = 0.0;
};

/// Writes history_<method>_<mode>.csv and trajectory_<method>_<mode>.csv per
/// (method, mode) pair.
std::vector<RunSummary> cmd_solve(const RunConfig& cfg);

/// Writes fig1_trajectories.csv, fig2_kappa_hat.csv + fig2_summary.csv or
/// fig3_step_pairs.csv + fig3_fits.csv into cfg.out_dir. Methods and modes
/// are fixed by the figure: GGN one-step runs for fig1, all six pairs else.
std::vector<RunSummary> cmd_reproduce(Figure figure, const RunConfig& cfg);

/// Writes contraction_report.json and returns the report.
ContractionReport cmd_analyze(const RunConfig& cfg);

// csv helpers

/// 17 significant digits, "nan"/"inf" spelled out, empty for absent values.
std::string format_double(double value);
std::string format_optional(std::optional<double> value);

void write_history_csv(const std::filesystem::path& path, const SolveHistory& history);
void write_trajectory_csv(const std::filesystem::path& path, const Iterate& it);

/// Whole-file write with LF line endings; throws OcpError on IO failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Window of distances used for the log-log order fits.
inline constexpr double kOrderFitLower = 1e-11;
inline constexpr double kOrderFitUpper = 1e-1;

Method parse_method(const std::string& name);
HessianMode parse_mode(const std::string& name);

}  // namespace ocpshoot::bench
