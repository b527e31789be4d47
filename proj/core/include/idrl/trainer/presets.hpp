// Copyright 2026 The IDRL Authors.
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

#include "idrl/trainer/experiment.hpp"

namespace idrl::trainer {

// Published setup: 64x64 frames, full network, batch 128, epsilon decay
// 0.9995, 300 episodes, ten agents, advisor trained first.
ExperimentConfig full_preset();

// Desk-scale setup used by the acceptance run. See docs/scaled-config.md.
ExperimentConfig scaled_preset();

}  // namespace idrl::trainer
