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
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ocpshoot/bench.hpp"

namespace ocpshoot::bench {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_optional(std::optional<double> value) {
  return value ? format_double(*value) : std::string();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  // binary mode keeps LF endings on every platform
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OcpError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw OcpError("write to " + path.string() + " failed");
}

void write_history_csv(const std::filesystem::path& path, const SolveHistory& history) {
  const std::vector<double> rates = empirical_rates(history);
  std::ostringstream os;
  os << "iter,step_norm,objective,feas_norm,kappa_hat\n";
  for (std::size_t k = 0; k < history.iterates.size(); ++k) {
    std::optional<double> step, rate;
    if (k >= 1) step = history.step_norms[k - 1];
    // rates[j] relates steps j and j+1, i.e. iterate j + 2
    if (k >= 2 && k - 2 < rates.size()) rate = rates[k - 2];
    os << k << ',' << format_optional(step) << ',' << format_double(history.objectives[k])
       << ',' << format_double(history.feasibility_norms[k]) << ',' << format_optional(rate)
       << '\n';
  }
  write_text_file(path, os.str());
}

void write_trajectory_csv(const std::filesystem::path& path, const Iterate& it) {
  const auto N = it.u.size();
  const auto nx = it.x.empty() ? 0 : it.x[0].size();
  const auto nu = it.u.empty() ? 0 : it.u[0].size();
  std::ostringstream os;
  os << 'i';
  for (Eigen::Index j = 0; j < nx; ++j) os << ",x" << j;
  for (Eigen::Index j = 0; j < nu; ++j) os << ",u" << j;
  os << '\n';
  for (std::size_t i = 0; i <= N; ++i) {
    os << i;
    for (Eigen::Index j = 0; j < nx; ++j) os << ',' << format_double(it.x[i][j]);
    for (Eigen::Index j = 0; j < nu; ++j) {
      os << ',';
      if (i < N) os << format_double(it.u[i][j]);
    }
    os << '\n';
  }
  write_text_file(path, os.str());
}

}  // namespace ocpshoot::bench
