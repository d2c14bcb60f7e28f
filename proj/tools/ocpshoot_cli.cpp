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

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "ocpshoot/bench.hpp"

using namespace ocpshoot;
using namespace ocpshoot::bench;

namespace {

struct Flags {
  std::string problem = "chen1998";
  std::string method = "ms";
  std::string mode = "ggn";
  std::string x0;
  int horizon = 0;
  double step_tol = 1e-12;
  int max_iters = 200;
  std::string line_search = "full";
  std::string init;
  std::string out = ".";
  std::uint64_t seed = 0;
  double cost_scale = 1.0;
};

VectorXd parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigurationError("--x0 expects comma-separated numbers, got '" + text + "'");
    }
  }
  if (values.empty()) throw ConfigurationError("--x0 is empty");
  return Eigen::Map<VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

RunConfig to_config(const Flags& f) {
  RunConfig cfg;
  cfg.problem = f.problem;
  cfg.methods.clear();
  if (f.method == "all") {
    cfg.methods = {Method::MultipleShooting, Method::SingleShooting, Method::DDP};
  } else {
    cfg.methods.push_back(parse_method(f.method));
  }
  cfg.modes.clear();
  if (f.mode == "all") {
    cfg.modes = {HessianMode::GGN, HessianMode::ExactHessian};
  } else {
    cfg.modes.push_back(parse_mode(f.mode));
  }
  if (!f.x0.empty()) cfg.x0 = parse_vector(f.x0);
  if (f.horizon != 0) cfg.horizon = f.horizon;
  cfg.step_tol = f.step_tol;
  cfg.max_iters = f.max_iters;
  if (f.line_search == "full") {
    cfg.line_search = FullStep{};
  } else if (f.line_search == "backtracking") {
    cfg.line_search = Backtracking{};
  } else {
    throw ConfigurationError("--line-search must be full or backtracking");
  }
  if (f.init == "lqr") {
    cfg.init = InitialGuess::Lqr;
  } else if (f.init == "near-solution") {
    cfg.init = InitialGuess::NearSolution;
  } else if (!f.init.empty()) {
    throw ConfigurationError("--init must be lqr or near-solution");
  }
  cfg.out_dir = f.out;
  cfg.seed = f.seed;
  cfg.cost_scale = f.cost_scale;
  return cfg;
}

void add_common(CLI::App* cmd, Flags& f, bool with_method) {
  cmd->add_option("--problem", f.problem, "registry name or lti-toy JSON file");
  if (with_method) {
    cmd->add_option("--method", f.method, "ms, ss, ddp or all");
    cmd->add_option("--mode", f.mode, "ggn, eh or all");
  }
  cmd->add_option("--x0", f.x0, "initial state, comma separated");
  cmd->add_option("--horizon", f.horizon, "number of stages");
  cmd->add_option("--step-tol", f.step_tol, "stop when the primal step norm is below this");
  cmd->add_option("--max-iters", f.max_iters);
  cmd->add_option("--line-search", f.line_search, "full or backtracking");
  cmd->add_option("--init", f.init, "initial guess: lqr or near-solution");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "perturbation direction for near-solution starts");
  cmd->add_option("--cost-scale", f.cost_scale, "multiply the whole objective");
}

void print_summaries(const std::vector<RunSummary>& runs) {
  for (const auto& r : runs) {
    std::printf("%-3s %-3s %-18s iterations=%d final_step=%s\n", to_string(r.method),
                to_string(r.mode), to_string(r.termination), r.iterations,
                format_double(r.final_step).c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiple shooting, single shooting and DDP on small optimal control problems"};
  app.require_subcommand(1);
  Flags flags;

  auto* solve_cmd = app.add_subcommand("solve", "solve a problem, write history and trajectory");
  add_common(solve_cmd, flags, true);

  std::string figure;
  auto* repro = app.add_subcommand("reproduce", "write plot data for fig1, fig2 or fig3");
  repro->add_option("figure", figure)->required()->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
  add_common(repro, flags, false);

  auto* analyze = app.add_subcommand("analyze", "contraction rates at the solution");
  add_common(analyze, flags, false);

  app.add_subcommand("list-problems", "print the registered problem names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list-problems")) {
      for (const auto& name : cmd_list_problems()) std::cout << name << '\n';
      return 0;
    }
    const RunConfig cfg = to_config(flags);
    if (app.got_subcommand(solve_cmd)) {
      print_summaries(cmd_solve(cfg));
    } else if (app.got_subcommand(repro)) {
      const Figure fig = figure == "fig1"   ? Figure::Fig1
                         : figure == "fig2" ? Figure::Fig2
                                            : Figure::Fig3;
      print_summaries(cmd_reproduce(fig, cfg));
    } else if (app.got_subcommand(analyze)) {
      const ContractionReport rep = cmd_analyze(cfg);
      std::printf("kappa_lmi=%s ms=%s ss=%s ddp=%s\n", format_double(rep.kappa_lmi).c_str(),
                  format_double(rep.kappa_spectral[0]).c_str(),
                  format_double(rep.kappa_spectral[1]).c_str(),
                  format_double(rep.kappa_spectral[2]).c_str());
    }
  } catch (const SoscViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const OcpError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
