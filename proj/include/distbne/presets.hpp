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

#ifndef DISTBNE_PRESETS_HPP_
#define DISTBNE_PRESETS_HPP_

#include <string>
#include <vector>

#include "distbne/config.hpp"

namespace distbne {

std::vector<std::string> preset_ids();
bool has_preset(const std::string& id);
// Throws Error("unknown preset: <id>").
ConfigMap preset_config(const std::string& id);

}  // namespace distbne

#endif  // DISTBNE_PRESETS_HPP_
