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

#include "distbne/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "distbne/presets.hpp"
#include "distbne/strategy_io.hpp"

namespace distbne {
namespace {

constexpr int kMaxIncludeDepth = 16;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(std::string_view(s).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

ConfigMap parse_impl(std::string_view text, const std::string& base_dir,
                     int depth);

ConfigMap load_impl(const std::string& path, int depth) {
  std::ifstream in(path);
  if (!in) throw Error("config not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse_impl(ss.str(), dir.empty() ? "." : dir, depth);
}

ConfigMap parse_impl(std::string_view text, const std::string& base_dir,
                     int depth) {
  if (depth > kMaxIncludeDepth) throw Error("config: include nesting too deep");
  ConfigMap map;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(lineno) +
                  ": expected key = value");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) {
      throw Error("config line " + std::to_string(lineno) + ": empty key");
    }
    if (key == "include") {
      ConfigMap inc;
      if (value.rfind("preset:", 0) == 0) {
        inc = preset_config(value.substr(7));
      } else {
        const auto p = std::filesystem::path(value).is_absolute()
                           ? std::filesystem::path(value)
                           : std::filesystem::path(base_dir) / value;
        inc = load_impl(p.string(), depth + 1);
      }
      for (auto& [k, v] : inc) map[k] = v;
      continue;
    }
    map[key] = value;
  }
  return map;
}

template <typename T>
T parse_integer(const std::string& key, const std::string& v) {
  T out{};
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw Error("config: " + key + " expects an integer, got '" + v + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const std::exception&) {
    throw Error("config: " + key + " expects a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error("config: " + key + " expects true or false, got '" + v + "'");
}

std::pair<double, double> parse_interval(const std::string& key,
                                         const std::string& v) {
  const auto parts = split(v, ':');
  if (parts.size() != 2) {
    throw Error("config: " + key + " expects lo:hi, got '" + v + "'");
  }
  const double lo = parse_real(key, parts[0]);
  const double hi = parse_real(key, parts[1]);
  if (!(lo < hi)) throw Error("config: " + key + " needs lo < hi");
  return {lo, hi};
}

// "a|b|c" per agent; a single entry applies to every agent.
std::vector<std::string> per_agent(const std::string& key,
                                   const std::string& v, int n) {
  auto parts = split(v, '|');
  if (parts.size() == 1) parts.assign(n, parts[0]);
  if (static_cast<int>(parts.size()) != n) {
    throw Error("config: " + key + " lists " + std::to_string(parts.size()) +
                " agents, expected " + std::to_string(n));
  }
  return parts;
}

std::vector<AxisSpec> axes(const std::string& count_key,
                           const std::string& counts,
                           const std::string& bounds_key,
                           const std::string& bounds, int n) {
  const auto c = per_agent(count_key, counts, n);
  const auto b = per_agent(bounds_key, bounds, n);
  std::vector<AxisSpec> out;
  for (int i = 0; i < n; ++i) {
    AxisSpec a;
    a.count = parse_integer<int>(count_key, c[i]);
    if (a.count < 2) throw Error("config: " + count_key + " must be >= 2");
    std::tie(a.lower, a.upper) = parse_interval(bounds_key, b[i]);
    out.push_back(a);
  }
  return out;
}

std::vector<double> real_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& p : split(v, ',')) out.push_back(parse_real(key, p));
  return out;
}

}  // namespace

ConfigMap parse_config(std::string_view text, const std::string& base_dir) {
  return parse_impl(text, base_dir, 0);
}

ConfigMap load_config(const std::string& path) { return load_impl(path, 0); }

std::string config_text(const ConfigMap& map) {
  std::string out;
  for (const auto& [k, v] : map) out += k + " = " + v + "\n";
  return out;
}

std::string config_hash(const ConfigMap& map) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_text(map)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "id",           "description",   "mechanism",    "agents",
      "payment_rule", "llg_tie", "tullock_r",     "split_c",      "split_cost",
      "split_bounds", "risk_rho",      "prior",        "prior.mean",
      "prior.sigma",  "prior.gamma",   "prior.density", "prior.samples",
      "prior.seed",   "obs.K",         "obs.bounds",   "val.M",
      "val.bounds",   "action.L",      "action.bounds", "learner",
      "eta0",         "beta",          "T",            "tol",
      "check_interval", "runs",        "seed",         "symmetric",
      "groups",       "init",          "eval.samples", "eval.baseline",
      "memory_budget", "plot.count",   "sweep.grid",   "chosen"};
  return keys;
}

RunConfig to_run_config(const ConfigMap& map) {
  const auto& known = known_config_keys();
  for (const auto& [k, v] : map) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw Error("config: unknown key '" + k + "'");
    }
  }
  auto get = [&](const std::string& k, const std::string& def) {
    const auto it = map.find(k);
    return it == map.end() ? def : it->second;
  };
  auto has = [&](const std::string& k) { return map.count(k) > 0; };

  RunConfig c;
  c.source = map;
  c.id = get("id", "custom");
  c.description = get("description", "");

  Mechanism& m = c.mech;
  m.kind = parse_mechanism_kind(get("mechanism", "fpsb"));
  const int default_n = m.kind == MechanismKind::kLlg ? 3 : 2;
  m.agents = has("agents") ? parse_integer<int>("agents", get("agents", ""))
                           : default_n;
  if (has("payment_rule")) {
    m.payment_rule = parse_payment_rule(get("payment_rule", ""));
  }
  if (has("llg_tie")) {
    const std::string t = get("llg_tie", "");
    if (t != "no_award" && t != "locals") {
      throw Error("config: llg_tie must be no_award or locals");
    }
    m.llg_ties_to_locals = t == "locals";
  }
  if (has("tullock_r")) m.tullock_r = parse_real("tullock_r", get("tullock_r", ""));
  if (has("split_c")) m.split_c = parse_real("split_c", get("split_c", ""));
  if (has("split_cost")) {
    const std::string sc = get("split_cost", "");
    if (sc == "multiplicative") {
      m.split_cost = SplitCost::kMultiplicative;
    } else if (sc == "additive") {
      m.split_cost = SplitCost::kAdditive;
    } else {
      throw Error("config: split_cost must be multiplicative or additive");
    }
  }
  if (has("split_bounds")) {
    const auto sb = real_list("split_bounds", get("split_bounds", ""));
    if (sb.size() != 4) throw Error("config: split_bounds needs 4 numbers");
    std::copy(sb.begin(), sb.end(), m.split_bounds.begin());
  }
  if (has("risk_rho")) m.risk_rho = parse_real("risk_rho", get("risk_rho", ""));
  m.validate();
  const int n = m.agents;

  c.prior = get("prior", "uniform");
  c.prior_mean = parse_real("prior.mean", get("prior.mean", "0"));
  c.prior_sigma = parse_real("prior.sigma", get("prior.sigma", "1"));
  c.prior_gamma = parse_real("prior.gamma", get("prior.gamma", "0.5"));
  if (has("prior.density")) {
    c.prior_density = real_list("prior.density", get("prior.density", ""));
  }
  c.prior_samples = parse_integer<std::uint64_t>(
      "prior.samples", get("prior.samples", "1000000"));
  c.prior_seed = parse_integer<std::uint64_t>("prior.seed", get("prior.seed", "0"));

  const std::string obs_bounds = get("obs.bounds", "0:1");
  c.obs = axes("obs.K", get("obs.K", "64"), "obs.bounds", obs_bounds, n);
  if (c.prior == "common_value" || c.prior == "affiliated") {
    c.val = axes("val.M", get("val.M", "64"), "val.bounds",
                 get("val.bounds", obs_bounds), n);
  }

  // Action axes: '|' separates agents, ',' separates dimensions.
  const int dims = m.action_dims();
  std::string default_bounds = obs_bounds;
  if (dims == 2) {
    default_bounds = format_double(m.split_bounds[0]) + ":" +
                     format_double(m.split_bounds[1]) + "," +
                     format_double(m.split_bounds[2]) + ":" +
                     format_double(m.split_bounds[3]);
  }
  const auto lc = per_agent("action.L", get("action.L", "64"), n);
  const auto lb = per_agent("action.bounds", get("action.bounds", default_bounds), n);
  for (int i = 0; i < n; ++i) {
    auto cs = split(lc[i], ',');
    const auto bs = split(lb[i], ',');
    if (cs.size() == 1) cs.assign(dims, cs[0]);
    if (static_cast<int>(cs.size()) != dims ||
        static_cast<int>(bs.size()) != dims) {
      throw Error("config: action axes must match the mechanism's " +
                  std::to_string(dims) + " action dimension(s)");
    }
    std::vector<AxisSpec> per;
    for (int d = 0; d < dims; ++d) {
      AxisSpec a;
      a.count = parse_integer<int>("action.L", cs[d]);
      if (a.count < 2) throw Error("config: action.L must be >= 2");
      std::tie(a.lower, a.upper) = parse_interval("action.bounds", bs[d]);
      per.push_back(a);
    }
    c.action.push_back(per);
  }

  c.learner.rule = parse_rule(get("learner", "soda1"));
  c.learner.eta0 = parse_real("eta0", get("eta0", "1"));
  c.learner.beta = parse_real("beta", get("beta", "0.5"));
  if (!(c.learner.eta0 > 0.0) || !(c.learner.beta >= 0.0)) {
    throw Error("config: eta0 must be > 0 and beta >= 0");
  }
  c.max_iterations = parse_integer<long>("T", get("T", "1000"));
  c.tolerance = parse_real("tol", get("tol", "1e-4"));
  c.check_interval = parse_integer<long>("check_interval", get("check_interval", "10"));
  c.runs = parse_integer<int>("runs", get("runs", "10"));
  c.seed = parse_integer<std::uint64_t>("seed", get("seed", "0"));
  if (c.max_iterations < 0 || c.check_interval < 1 || c.runs < 1) {
    throw Error("config: need T >= 0, check_interval >= 1 and runs >= 1");
  }
  if (has("groups")) {
    for (const auto& g : split(get("groups", ""), ',')) {
      c.groups.push_back(parse_integer<int>("groups", g));
    }
    if (static_cast<int>(c.groups.size()) != n) {
      throw Error("config: groups needs one entry per agent");
    }
  } else if (parse_bool("symmetric", get("symmetric", "false"))) {
    c.groups.assign(n, 0);
  }
  c.init = parse_init_mode(get("init", "random"));

  c.eval_samples = parse_integer<std::uint64_t>(
      "eval.samples", get("eval.samples", std::to_string(std::uint64_t{1} << 18)));
  c.eval_baseline = parse_bool("eval.baseline", get("eval.baseline", "true"));
  c.memory_budget = parse_integer<std::size_t>(
      "memory_budget", get("memory_budget", std::to_string(std::size_t{2} << 30)));
  c.plot_count = parse_integer<int>("plot.count", get("plot.count", "150"));
  if (c.plot_count < 1) throw Error("config: plot.count must be >= 1");
  if (has("sweep.grid")) {
    for (const auto& g : split(get("sweep.grid", ""), ',')) {
      const int k = parse_integer<int>("sweep.grid", g);
      if (k < 2) throw Error("config: sweep.grid entries must be >= 2");
      c.sweep_grid.push_back(k);
    }
  }
  if (has("chosen") && !get("chosen", "").empty()) {
    c.chosen = split(get("chosen", ""), ',');
  }
  return c;
}

}  // namespace distbne
