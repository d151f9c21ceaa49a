// Copyright 2026 The qlre Authors
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


#pragma once

#include <string>
#include <vector>

namespace qlre {

enum class ValidationScale { Quick, Full };

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Largest middle-domain population exercised: 5 for quick, 8 for full.
int validation_cap(ValidationScale scale);

/// Oracle suite: measure identities, closed-form chain formulas, dark-state
/// stationarity, simulated steady states against the closed forms and
/// backend agreement.
std::vector<CheckResult> run_validation(ValidationScale scale);

}  // namespace qlre
