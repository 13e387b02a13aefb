// Copyright 2026 The distbne Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "distbne/strategy_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace distbne {
namespace {

using nlohmann::json;

json grid_to_json(const Grid& g) {
  json arr = json::array();
  for (double x : g.points()) arr.push_back(format_double(x));
  return arr;
}

Grid grid_from_json(const json& j) {
  std::vector<double> pts;
  for (const auto& x : j) pts.push_back(parse_double(x.get<std::string>()));
  return Grid(std::move(pts));
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error("cannot parse number '" + std::string(s) + "'");
  }
  return x;
}

void write_strategy(const std::string& path, const Strategy& s,
                    const StrategyMeta& meta) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "obs_index,action_index,mass,obs_value";
  for (int d = 0; d < s.action_dims(); ++d) out << ",action_value" << d;
  out << "\n";
  for (int k = 0; k < s.obs_count(); ++k) {
    const std::string ov = format_double(s.obs_grid[k]);
    for (int l = 0; l < s.action_count(); ++l) {
      out << k << ',' << l << ',' << format_double(s.matrix(k, l)) << ','
          << ov;
      for (double a : s.action_values(l)) out << ',' << format_double(a);
      out << '\n';
    }
  }
  if (!out) throw Error("write failed for " + path);

  json j;
  j["mechanism"] = meta.mechanism_id;
  j["agent"] = meta.agent;
  j["iteration"] = meta.iteration;
  j["seed"] = std::to_string(meta.seed);
  j["config_hash"] = meta.config_hash;
  j["version"] = meta.version;
  j["obs_grid"] = grid_to_json(s.obs_grid);
  j["action_grids"] = json::array();
  for (const auto& g : s.action_grids) j["action_grids"].push_back(grid_to_json(g));
  j["marginal"] = json::array();
  for (double m : s.marginal) j["marginal"].push_back(format_double(m));
  std::ofstream side(path + ".meta.json");
  if (!side) throw Error("cannot write " + path + ".meta.json");
  side << j.dump(1) << "\n";
}

Strategy read_strategy(const std::string& path, StrategyMeta* meta) {
  std::ifstream side(path + ".meta.json");
  if (!side) throw Error("cannot read " + path + ".meta.json");
  json j;
  try {
    side >> j;
  } catch (const json::exception& e) {
    throw Error("malformed strategy metadata: " + std::string(e.what()));
  }
  Grid obs = grid_from_json(j.at("obs_grid"));
  std::vector<Grid> actions;
  for (const auto& g : j.at("action_grids")) actions.push_back(grid_from_json(g));
  std::vector<double> marginal;
  for (const auto& m : j.at("marginal")) {
    marginal.push_back(parse_double(m.get<std::string>()));
  }
  if (meta) {
    meta->mechanism_id = j.value("mechanism", "");
    meta->agent = j.value("agent", 0);
    meta->iteration = j.value("iteration", 0L);
    meta->seed = std::stoull(j.value("seed", std::string("0")));
    meta->config_hash = j.value("config_hash", "");
    meta->version = j.value("version", "");
  }

  int L = 1;
  for (const auto& g : actions) L *= g.size();
  Matrix m(obs.size(), L);
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("obs_index,action_index,mass,obs_value", 0) != 0) {
    throw Error(path + ": unexpected strategy header");
  }
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::string_view v(line);
    auto next = [&]() {
      const auto c = v.find(',');
      std::string_view f = v.substr(0, c);
      v = c == std::string_view::npos ? std::string_view() : v.substr(c + 1);
      return f;
    };
    const int k = static_cast<int>(parse_double(next()));
    const int l = static_cast<int>(parse_double(next()));
    if (k < 0 || k >= m.rows || l < 0 || l >= m.cols) {
      throw Error(path + ": index out of range");
    }
    m(k, l) = parse_double(next());
    ++seen;
  }
  if (seen != m.data.size()) throw Error(path + ": incomplete strategy matrix");
  Strategy s{std::move(m), std::move(obs), std::move(actions),
             std::move(marginal)};
  check_feasible(s);
  return s;
}

}  // namespace distbne
