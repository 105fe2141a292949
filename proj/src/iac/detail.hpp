// Copyright 2026 The slsa-audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "slsa_audit/iaclint.hpp"

namespace slsa::iac::detail {

void parse_structured(std::string_view contents, TemplateModel& model);
void parse_hcl(std::string_view contents, TemplateModel& model);

int count_lines(std::string_view contents);

// Value of a scalar, or of a reference that resolves through parameter
// defaults. nullopt when undetermined.
std::optional<std::string> resolve_scalar(const Node& n, const TemplateModel* model);

// Parameter names a reference node mentions (`Ref X`, `${X}`, `var.X`).
std::set<std::string> referenced_params(const Node& ref);

// Lowercase with '_' and '-' removed.
std::string normalize_key(std::string_view key);

}  // namespace slsa::iac::detail
