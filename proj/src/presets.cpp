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

#include "distbne/presets.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace distbne {
namespace {

struct Step {
  std::string eta0;
  std::string beta;
  bool chosen = false;
};

// Published step rules per experiment family; SOFW and FP have none.
using StepTable = std::map<std::string, Step>;

const std::vector<std::string> kRules = {"soda1", "soda2", "soma2", "sofw", "fp"};

ConfigMap with_rule(ConfigMap m, const std::string& rule, const StepTable& t) {
  m["learner"] = rule;
  const auto it = t.find(rule);
  if (it != t.end()) {
    m["eta0"] = it->second.eta0;
    m["beta"] = it->second.beta;
    if (it->second.chosen) {
      m["chosen"] = m.count("chosen") && !m["chosen"].empty()
                        ? m["chosen"] + ",eta0,beta"
                        : "eta0,beta";
    }
  }
  return m;
}

std::string fmt_gamma(const std::string& g) {
  std::string out = g;
  out.erase(std::remove(out.begin(), out.end(), '.'), out.end());
  return out;
}

using Registry = std::map<std::string, ConfigMap>;

void add(Registry& r, const std::string& id, ConfigMap m) {
  m["id"] = id;
  r[id] = std::move(m);
}

Registry build() {
  Registry r;

  // Single-item first-price baseline, two bidders, uniform values.
  const ConfigMap fpsb = {{"mechanism", "fpsb"},     {"agents", "2"},
                          {"prior", "uniform"},      {"obs.K", "64"},
                          {"obs.bounds", "0:1"},     {"action.L", "64"},
                          {"action.bounds", "0:1"},  {"learner", "soda1"},
                          {"eta0", "100"},           {"beta", "0.05"},
                          {"symmetric", "true"},     {"T", "1000"},
                          {"description", "FPSB, n=2, U(0,1), beta(o)=o/2"},
                          {"chosen", "symmetric,eta0"}};
  add(r, "fpsb_2_uniform", fpsb);
  {
    ConfigMap m = fpsb;
    m["sweep.grid"] = "16,32,64,128";
    m["eta0"] = "10";
    m["tol"] = "0";
    m["chosen"] = "symmetric";
    m["description"] = "FPSB n=2 discretization sweep K=L in {16,32,64,128}";
    add(r, "fpsb_2_uniform_sweep", m);
  }

  // Common value, three bidders, second price.
  {
    const ConfigMap base = {
        {"mechanism", "spsb"},    {"agents", "3"},        {"prior", "common_value"},
        {"obs.K", "64"},          {"obs.bounds", "0:2"},  {"val.M", "64"},
        {"val.bounds", "0:1"},    {"action.L", "64"},     {"action.bounds", "0:1.5"},
        {"symmetric", "true"},
        {"description", "common value SPSB, n=3, beta(o)=2o/(2+o)"}};
    const StepTable t = {{"soda1", {"100", "0.5"}},
                         {"soda2", {"1", "0.05"}},
                         {"soma2", {"50", "0.5"}}};
    for (const auto& rule : kRules) {
      add(r, "common_value_spsb_" + rule, with_rule(base, rule, t));
    }
  }

  // Affiliated values, two bidders.
  for (const std::string mech : {"fpsb", "spsb"}) {
    ConfigMap base = {
        {"mechanism", mech},    {"agents", "2"},         {"prior", "affiliated"},
        {"obs.K", "64"},        {"obs.bounds", "0:2"},   {"val.M", "64"},
        {"val.bounds", "0:2"},  {"action.L", "64"},      {"action.bounds", "0:1.5"},
        {"symmetric", "true"},
        {"description", "affiliated values " + mech + ", n=2"}};
    const StepTable t = {{"soda1", {"100", "0.5"}},
                         {"soda2", {"1", "0.5"}},
                         {"soma2", {"1", "0.5"}}};
    if (mech == "spsb") base["chosen"] = "mechanism";
    for (const auto& rule : kRules) {
      add(r, "affiliated_" + mech + "_" + rule, with_rule(base, rule, t));
    }
  }

  // LLG with Bernoulli weights correlation.
  for (const std::string pr : {"nz", "nvcg", "nb", "first_price"}) {
    for (const std::string g : {"0.1", "0.5", "0.9"}) {
      ConfigMap base = {
          {"mechanism", "llg"},        {"agents", "3"},
          {"payment_rule", pr},        {"llg_tie", "locals"},
          {"prior", "bernoulli_llg"},
          {"prior.gamma", g},          {"obs.K", "64"},
          {"obs.bounds", "0:1|0:1|0:2"}, {"action.L", "64"},
          {"action.bounds", "0:1|0:1|0:2"}, {"groups", "0,0,1"},
          {"description", "LLG " + pr + ", gamma=" + g}};
      base["chosen"] = "llg_tie";
      const bool fp = pr == "first_price";
      const StepTable t = {{"soda1", {"100", "0.05", fp}},
                           {"soda2", {"50", "0.05", fp}},
                           {"soma2", {"50", "0.05", fp}}};
      for (const auto& rule : kRules) {
        add(r, "llg_" + pr + "_g" + fmt_gamma(g) + "_" + rule,
            with_rule(base, rule, t));
      }
    }
  }

  // Split-award procurement, two suppliers.
  for (const std::string pr : {"uniform", "gaussian"}) {
    ConfigMap base = {
        {"mechanism", "split_award"}, {"agents", "2"},
        {"split_c", "0.3"},           {"split_cost", "multiplicative"},
        {"obs.K", "32"},              {"obs.bounds", "1:1.4"},
        {"action.L", "64"},           {"action.bounds", "1:2.5,0.3:1.2"},
        {"symmetric", "true"},        {"chosen", "symmetric"},
        {"description", "split award, " + pr + " prior, C=0.3"}};
    if (pr == "uniform") {
      base["prior"] = "uniform";
    } else {
      base["prior"] = "gaussian_trunc";
      base["prior.mean"] = "1.2";
      base["prior.sigma"] = "0.1";
    }
    const StepTable t =
        pr == "uniform" ? StepTable{{"soda1", {"20", "0.05"}},
                                    {"soda2", {"0.05", "0.05"}},
                                    {"soma2", {"0.01", "0.5"}}}
                        : StepTable{{"soda1", {"20", "0.05"}},
                                    {"soda2", {"0.05", "0.05"}},
                                    {"soma2", {"0.05", "0.5"}}};
    for (const auto& rule : kRules) {
      add(r, "split_award_" + pr + "_" + rule, with_rule(base, rule, t));
    }
  }

  // Risk-averse first-price and all-pay.
  for (const std::string mech : {"fpsb", "all_pay"}) {
    for (const std::string rho : {"0.5", "0.7", "0.9", "1"}) {
      const ConfigMap base = {
          {"mechanism", mech},   {"agents", "2"},         {"risk_rho", rho},
          {"prior", "uniform"},  {"obs.K", "64"},         {"obs.bounds", "0:1"},
          {"action.L", "64"},    {"action.bounds", "0:0.8"},
          {"symmetric", "true"},
          {"description", mech + " with CRRA rho=" + rho}};
      const bool ap = mech == "all_pay";
      const StepTable t = {{"soda1", {ap ? "25" : "20", "0.05"}},
                           {"soda2", {"0.1", "0.05", ap}},
                           {"soma2", {"0.5", "0.5", ap}}};
      for (const auto& rule : kRules) {
        add(r, "risk_" + mech + "_rho" + fmt_gamma(rho) + "_" + rule,
            with_rule(base, rule, t));
      }
    }
  }

  // r-Tullock contests.
  for (const std::string rr : {"0.5", "1", "1.5"}) {
    for (const bool asym : {false, true}) {
      ConfigMap base = {
          {"mechanism", "tullock"}, {"agents", "2"},   {"tullock_r", rr},
          {"prior", "uniform"},     {"obs.K", "64"},   {"action.L", "64"},
          {"action.bounds", "0:0.5"},
          {"description", std::string("Tullock r=") + rr +
                              (asym ? ", weak U(0,1) vs strong U(1,2)"
                                    : ", symmetric U(0,1)")}};
      if (asym) {
        base["obs.bounds"] = "0:1|1:2";
      } else {
        base["obs.bounds"] = "0:1";
        base["symmetric"] = "true";
      }
      const StepTable t = {{"soda1", {"100", "0.05"}},
                           {"soda2", {"10", "0.05"}},
                           {"soma2", {"100", "0.5"}}};
      for (const auto& rule : kRules) {
        add(r, "tullock_r" + fmt_gamma(rr) + (asym ? "_asym_" : "_sym_") + rule,
            with_rule(base, rule, t));
      }
    }
  }
  return r;
}

const Registry& registry() {
  static const Registry r = build();
  return r;
}

}  // namespace

std::vector<std::string> preset_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, m] : registry()) ids.push_back(id);
  return ids;
}

bool has_preset(const std::string& id) { return registry().count(id) > 0; }

ConfigMap preset_config(const std::string& id) {
  const auto it = registry().find(id);
  if (it == registry().end()) throw Error("unknown preset: " + id);
  return it->second;
}

}  // namespace distbne
