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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ocpshoot/bench.hpp"

namespace ocpshoot::bench {

namespace {

bool is_problem_file(const std::string& name) {
  return std::filesystem::path(name).extension() == ".json";
}

MatrixXd matrix_from_json(const nlohmann::json& j, const char* field) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ConfigurationError(std::string("field '") + field + "' must be a nested array");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (j[r].size() != static_cast<std::size_t>(cols)) {
      throw ConfigurationError(std::string("ragged rows in '") + field + "'");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

VectorXd vector_from_json(const nlohmann::json& j, const char* field) {
  if (!j.is_array()) {
    throw ConfigurationError(std::string("field '") + field + "' must be an array");
  }
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  return v;
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "ms") return Method::MultipleShooting;
  if (name == "ss") return Method::SingleShooting;
  if (name == "ddp") return Method::DDP;
  throw ConfigurationError("unknown method '" + name + "' (expected ms, ss or ddp)");
}

HessianMode parse_mode(const std::string& name) {
  if (name == "ggn") return HessianMode::GGN;
  if (name == "eh") return HessianMode::ExactHessian;
  throw ConfigurationError("unknown mode '" + name + "' (expected ggn or eh)");
}

LtiSpec parse_lti_spec(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("malformed problem file: ") + e.what());
  }
  if (!j.is_object()) throw ConfigurationError("problem file must hold a JSON object");
  if (j.value("family", std::string("lti-toy")) != "lti-toy") {
    throw ConfigurationError("inline problems support only the lti-toy family");
  }
  if (!j.contains("A") || !j.contains("B")) {
    throw ConfigurationError("inline lti-toy problem needs A and B");
  }
  try {
    const MatrixXd A = matrix_from_json(j["A"], "A");
    const MatrixXd B = matrix_from_json(j["B"], "B");
    const int N = j.value("horizon", 10);
    LtiSpec spec = default_lti_spec(static_cast<int>(A.rows()), static_cast<int>(B.cols()), N);
    spec.A = A;
    spec.B = B;
    if (j.contains("Q")) spec.Q = matrix_from_json(j["Q"], "Q");
    if (j.contains("R")) spec.R = matrix_from_json(j["R"], "R");
    if (j.contains("P")) spec.P = matrix_from_json(j["P"], "P");
    if (j.contains("x0")) spec.x0 = vector_from_json(j["x0"], "x0");
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("bad value in problem file: ") + e.what());
  }
}

void RunConfig::validate() const {
  if (methods.empty()) throw ConfigurationError("no method selected");
  if (modes.empty()) throw ConfigurationError("no Hessian mode selected");
  if (!(cost_scale > 0.0) || !std::isfinite(cost_scale)) {
    throw ConfigurationError("cost scale must be positive and finite");
  }
  if (horizon && *horizon < 1) throw ConfigurationError("horizon must be >= 1");
  if (x0 && !x0->allFinite()) throw ConfigurationError("x0 must be finite");
  if (!is_problem_file(problem)) {
    const auto names = registry_names();
    if (std::find(names.begin(), names.end(), problem) == names.end()) {
      // registry_get produces the message listing the registered names
      registry_get(problem);
    }
  }
  for (Method m : methods) {
    for (HessianMode mode : modes) solver_config(m, mode).validate();
  }
}

SolverConfig RunConfig::solver_config(Method method, HessianMode mode) const {
  SolverConfig cfg;
  cfg.method = method;
  cfg.mode = mode;
  cfg.step_tol = step_tol;
  cfg.max_iters = max_iters;
  cfg.line_search = line_search;
  return cfg;
}

OcpProblem build_problem(const RunConfig& cfg) {
  if (!is_problem_file(cfg.problem)) {
    ProblemOptions opts;
    opts.horizon = cfg.horizon;
    opts.x0 = cfg.x0;
    opts.cost_scale = cfg.cost_scale;
    return registry_get(cfg.problem, opts);
  }
  std::ifstream in(cfg.problem, std::ios::binary);
  if (!in) throw ConfigurationError("cannot read problem file " + cfg.problem);
  std::ostringstream text;
  text << in.rdbuf();
  LtiSpec spec = parse_lti_spec(text.str());
  if (cfg.horizon) spec.N = *cfg.horizon;
  if (cfg.x0) spec.x0 = *cfg.x0;
  spec.cost_scale = cfg.cost_scale;
  return make_lti_problem(spec);
}

std::vector<std::string> cmd_list_problems() { return registry_names(); }

}  // namespace ocpshoot::bench
