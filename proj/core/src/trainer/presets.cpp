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

#include "idrl/trainer/presets.hpp"

namespace idrl::trainer {

ExperimentConfig full_preset() {
  ExperimentConfig c;
  c.n_agents = 10;
  c.advisor = AdvisorSource::TrainFirst;
  return c;
}

ExperimentConfig scaled_preset() {
  ExperimentConfig c;
  c.n_agents = 5;
  c.train.episodes = 120;
  c.train.batch_size = 32;
  c.train.epsilon_decay = 0.999;
  c.train.learning_rate = 3e-4;
  c.observation.side = 32;
  c.network = nn::NetworkConfig::reduced(32, 64);
  c.advisor = AdvisorSource::Oracle;
  return c;
}

}  // namespace idrl::trainer
