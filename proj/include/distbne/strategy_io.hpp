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

#ifndef DISTBNE_STRATEGY_IO_HPP_
#define DISTBNE_STRATEGY_IO_HPP_

#include <cstdint>
#include <string>
#include <string_view>

#include "distbne/strategy.hpp"

namespace distbne {

struct StrategyMeta {
  std::string mechanism_id;
  int agent = 0;
  long iteration = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string version = DISTBNE_VERSION;
};

// Shortest decimal text that parses back to the identical double.
std::string format_double(double x);
double parse_double(std::string_view s);

// Writes `path` (CSV, one line per matrix cell) and `path + ".meta.json"`.
void write_strategy(const std::string& path, const Strategy& s,
                    const StrategyMeta& meta);
// Reads both files back; the matrix round-trips bit-exactly.
Strategy read_strategy(const std::string& path, StrategyMeta* meta = nullptr);

}  // namespace distbne

#endif  // DISTBNE_STRATEGY_IO_HPP_
