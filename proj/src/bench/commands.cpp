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

#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "ocpshoot/bench.hpp"

namespace ocpshoot::bench {

namespace {

constexpr Method kAllMethods[] = {Method::MultipleShooting, Method::SingleShooting,
                                  Method::DDP};
constexpr HessianMode kAllModes[] = {HessianMode::GGN, HessianMode::ExactHessian};

std::string run_tag(Method m, HessianMode mode) {
  return std::string(to_string(m)) + "_" + to_string(mode);
}

void ensure_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw OcpError("cannot create output directory " + dir.string());
  }
}

Iterate initial_guess(const OcpProblem& problem, InitialGuess kind, std::uint64_t seed,
                      std::optional<Iterate>& z_star) {
  if (kind == InitialGuess::Lqr) return lqr_feasible_init(problem);
  if (!z_star) z_star = reference_solution(problem).z_star;
  return feasible_perturbation(problem, *z_star, perturbation_direction(problem.dims, seed),
                               kNearSolutionOffset);
}

RunSummary summarize(Method m, HessianMode mode, const SolveHistory& h) {
  return {m, mode, h.termination, h.iterations(),
          h.step_norms.empty() ? 0.0 : h.step_norms.back()};
}

// Max-abs dynamics residual attached to each state: row 0 is the initial
// state condition, row i + 1 the gap after stage i.
std::vector<double> stage_gaps(const OcpProblem& problem, const Iterate& it) {
  std::vector<double> gaps;
  for (const auto& row : dynamics_feasibility_residual(problem, it).rows) {
    gaps.push_back(row.lpNorm<Eigen::Infinity>());
  }
  return gaps;
}

void reproduce_fig1(const OcpProblem& problem, const RunConfig& cfg,
                    std::vector<RunSummary>& out) {
  std::optional<Iterate> z_star;
  const Iterate init =
      initial_guess(problem, cfg.init.value_or(InitialGuess::Lqr), cfg.seed, z_star);
  const Dims& d = problem.dims;

  struct Column {
    std::string name;
    std::optional<Iterate> it;
    std::vector<double> gaps;
  };
  std::vector<Column> cols;
  cols.push_back({"init", init, stage_gaps(problem, init)});
  for (Method m : kAllMethods) {
    SolverConfig sc;
    sc.method = m;
    sc.mode = HessianMode::GGN;
    sc.max_iters = 1;
    sc.step_tol = cfg.step_tol;
    const SolveHistory h = solve(problem, init, sc);
    out.push_back(summarize(m, HessianMode::GGN, h));
    Column c{to_string(m), std::nullopt, {}};
    if (h.iterations() == 1) {
      c.it = h.iterates.back();
      c.gaps = stage_gaps(problem, *c.it);
    }
    cols.push_back(std::move(c));
  }

  std::ostringstream os;
  os << 'i';
  for (const auto& c : cols) {
    for (int j = 0; j < d.nx; ++j) os << ',' << c.name << "_x" << j;
    for (int j = 0; j < d.nu; ++j) os << ',' << c.name << "_u" << j;
    os << ',' << c.name << "_gap";
  }
  os << '\n';
  for (int i = 0; i <= d.N; ++i) {
    os << i;
    for (const auto& c : cols) {
      for (int j = 0; j < d.nx; ++j) os << ',' << (c.it ? format_double(c.it->x[i][j]) : "");
      for (int j = 0; j < d.nu; ++j) {
        os << ',' << (c.it && i < d.N ? format_double(c.it->u[i][j]) : "");
      }
      os << ',' << (c.it ? format_double(c.gaps[i]) : "");
    }
    os << '\n';
  }
  write_text_file(cfg.out_dir / "fig1_trajectories.csv", os.str());
}

struct PairRun {
  Method method;
  HessianMode mode;
  SolveHistory history;
};

std::vector<PairRun> run_all_pairs(const OcpProblem& problem, const Iterate& init,
                                   const RunConfig& cfg) {
  std::vector<PairRun> runs;
  for (Method m : kAllMethods) {
    for (HessianMode mode : kAllModes) {
      runs.push_back({m, mode, solve(problem, init, cfg.solver_config(m, mode))});
    }
  }
  return runs;
}

void reproduce_fig2(const OcpProblem& problem, const RunConfig& cfg,
                    std::vector<RunSummary>& out) {
  std::optional<Iterate> z_star;
  const Iterate init =
      initial_guess(problem, cfg.init.value_or(InitialGuess::NearSolution), cfg.seed, z_star);
  const auto runs = run_all_pairs(problem, init, cfg);

  std::ostringstream series, summary;
  series << "method,mode,iter,step_norm,kappa_hat\n";
  summary << "method,mode,termination,iterations,final_step,kappa_hat_last,kappa_hat_settled\n";
  for (const auto& r : runs) {
    const auto rates = empirical_rates(r.history);
    for (int k = 1; k <= r.history.iterations(); ++k) {
      std::optional<double> rate;
      if (k >= 2 && static_cast<std::size_t>(k - 2) < rates.size()) rate = rates[k - 2];
      series << to_string(r.method) << ',' << to_string(r.mode) << ',' << k << ','
             << format_double(r.history.step_norms[k - 1]) << ',' << format_optional(rate)
             << '\n';
    }
    const RunSummary s = summarize(r.method, r.mode, r.history);
    out.push_back(s);
    summary << to_string(r.method) << ',' << to_string(r.mode) << ','
            << to_string(r.history.termination) << ',' << s.iterations << ','
            << format_double(s.final_step) << ','
            << format_optional(rates.empty() ? std::nullopt : std::optional(rates.back()))
            << ',' << format_double(settled_rate(r.history.step_norms)) << '\n';
  }
  write_text_file(cfg.out_dir / "fig2_kappa_hat.csv", series.str());
  write_text_file(cfg.out_dir / "fig2_summary.csv", summary.str());
}

void reproduce_fig3(const OcpProblem& problem, const RunConfig& cfg,
                    std::vector<RunSummary>& out) {
  std::optional<Iterate> z_star = reference_solution(problem).z_star;
  const Iterate init =
      initial_guess(problem, cfg.init.value_or(InitialGuess::NearSolution), cfg.seed, z_star);
  const auto runs = run_all_pairs(problem, init, cfg);

  std::ostringstream pairs, fits;
  pairs << "method,mode,iter,step_prev,step_next,dist_prev,dist_next\n";
  fits << "method,mode,basis,slope,intercept,rate,points\n";
  for (const auto& r : runs) {
    const auto& steps = r.history.step_norms;
    const auto dists = distances_to(r.history, *z_star);
    for (std::size_t k = 1; k < steps.size(); ++k) {
      pairs << to_string(r.method) << ',' << to_string(r.mode) << ',' << k << ','
            << format_double(steps[k - 1]) << ',' << format_double(steps[k]) << ','
            << format_double(dists[k]) << ',' << format_double(dists[k + 1]) << '\n';
    }
    const OrderFit by_dist = fit_convergence_order(dists, kOrderFitLower, kOrderFitUpper);
    const OrderFit by_step = fit_convergence_order(steps, kOrderFitLower, kOrderFitUpper);
    for (const auto& [basis, fit] : {std::pair{"distance", by_dist}, std::pair{"step", by_step}}) {
      fits << to_string(r.method) << ',' << to_string(r.mode) << ',' << basis << ','
           << format_double(fit.slope) << ',' << format_double(fit.intercept) << ','
           << format_double(fit.rate()) << ',' << fit.points << '\n';
    }
    out.push_back(summarize(r.method, r.mode, r.history));
  }
  write_text_file(cfg.out_dir / "fig3_step_pairs.csv", pairs.str());
  write_text_file(cfg.out_dir / "fig3_fits.csv", fits.str());
}

nlohmann::json json_number(double v) {
  // JSON has no NaN
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::vector<RunSummary> cmd_solve(const RunConfig& cfg) {
  cfg.validate();
  const OcpProblem problem = build_problem(cfg);
  ensure_out_dir(cfg.out_dir);
  std::optional<Iterate> z_star;
  const Iterate init =
      initial_guess(problem, cfg.init.value_or(InitialGuess::Lqr), cfg.seed, z_star);

  std::vector<RunSummary> out;
  for (Method m : cfg.methods) {
    for (HessianMode mode : cfg.modes) {
      const SolveHistory h = solve(problem, init, cfg.solver_config(m, mode));
      const std::string tag = run_tag(m, mode);
      write_history_csv(cfg.out_dir / ("history_" + tag + ".csv"), h);
      write_trajectory_csv(cfg.out_dir / ("trajectory_" + tag + ".csv"), h.iterates.back());
      out.push_back(summarize(m, mode, h));
    }
  }
  return out;
}

std::vector<RunSummary> cmd_reproduce(Figure figure, const RunConfig& cfg) {
  cfg.validate();
  const OcpProblem problem = build_problem(cfg);
  ensure_out_dir(cfg.out_dir);
  std::vector<RunSummary> out;
  switch (figure) {
    case Figure::Fig1: reproduce_fig1(problem, cfg, out); break;
    case Figure::Fig2: reproduce_fig2(problem, cfg, out); break;
    case Figure::Fig3: reproduce_fig3(problem, cfg, out); break;
  }
  return out;
}

ContractionReport cmd_analyze(const RunConfig& cfg) {
  cfg.validate();
  const OcpProblem problem = build_problem(cfg);
  ensure_out_dir(cfg.out_dir);

  AnalysisOptions opts;
  opts.seed = cfg.seed;
  opts.max_iters = cfg.max_iters;
  opts.history_start = cfg.init.value_or(InitialGuess::NearSolution) == InitialGuess::Lqr
                           ? HistoryStart::Lqr
                           : HistoryStart::NearSolution;
  const ContractionReport rep = analyze_contraction(problem, opts);

  nlohmann::ordered_json j;
  j["problem"] = problem.name;
  j["norm"] = "2-norm over the primal variables (x_0, u_0, ..., x_N)";
  j["kappa_lmi"] = json_number(rep.kappa_lmi);
  j["kappa_spectral"] = {{"ms", json_number(rep.kappa_spectral[0])},
                         {"ss", json_number(rep.kappa_spectral[1])},
                         {"ddp", json_number(rep.kappa_spectral[2])}};
  j["kappa_spectral_ms_full"] = json_number(rep.kappa_spectral_ms_full);
  nlohmann::ordered_json hats;
  for (Method m : kAllMethods) {
    const int k = static_cast<int>(m);
    const auto& series = rep.kappa_hat_series[k];
    nlohmann::ordered_json entry;
    entry["termination"] = to_string(rep.terminations[k]);
    entry["final"] = series.empty() ? nlohmann::json(nullptr) : json_number(series.back());
    entry["settled"] = json_number(rep.kappa_hat_settled[k]);
    nlohmann::json values = nlohmann::json::array();
    for (double v : series) values.push_back(json_number(v));
    entry["series"] = std::move(values);
    hats[to_string(m)] = std::move(entry);
  }
  j["kappa_hat"] = std::move(hats);
  nlohmann::json eig = nlohmann::json::array();
  for (Eigen::Index i = 0; i < rep.generalized_eigenvalues.size(); ++i) {
    eig.push_back(json_number(rep.generalized_eigenvalues[i]));
  }
  j["generalized_eigenvalues"] = std::move(eig);
  j["diagnostics"] = {
      {"reference_source", rep.reference_source},
      {"reduced_hessian_min_eigenvalue", json_number(rep.reduced_hessian_min_eigenvalue)},
      {"nullspace_residual", json_number(rep.nullspace_residual)},
      {"z_rows", rep.z_rows},
      {"z_cols", rep.z_cols},
      {"history_start", opts.history_start == HistoryStart::Lqr ? "lqr" : "near-solution"},
      {"start_offset", opts.start_offset},
      {"seed", opts.seed},
      {"cost_scale", cfg.cost_scale}};
  write_text_file(cfg.out_dir / "contraction_report.json", j.dump(2) + "\n");
  return rep;
}

}  // namespace ocpshoot::bench
