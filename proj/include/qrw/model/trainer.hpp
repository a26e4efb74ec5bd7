// Copyright 2026 The qrw Authors.
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


#ifndef QRW_MODEL_TRAINER_HPP_
#define QRW_MODEL_TRAINER_HPP_

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "qrw/datagen.hpp"
#include "qrw/model/loss.hpp"
#include "qrw/model/model.hpp"

namespace qrw {

struct EpochRecord {
  int epoch = 0;            // 1-based
  LossBreakdown loss;       // mean over training examples
  double valid_exact_match = 0;
  double seconds = 0;

  // {epoch, L_RD, L_RR, L_Del, L, valid_exact_match}
  nlohmann::json ToJson() const;
  // Reads ToJson() output; `seconds` is optional.
  static EpochRecord FromJson(const nlohmann::json &j);
};

struct TrainOptions {
  bool parallel = true;
  // When set, the full optimizer state is written here after every epoch.
  std::filesystem::path state_path;
  // Continue from state_path instead of starting fresh.
  bool resume = false;
  // Start from these weights and vocabulary instead of a fresh model. Its
  // config must match the training config.
  const Model *initial = nullptr;
  // Stop once validation exact match reaches this value.
  std::optional<double> target_exact_match;
  std::function<void(const EpochRecord &)> on_epoch;
};

struct TrainResult {
  Model best;  // best validation exact match, earliest epoch on ties
  Model last;
  std::vector<EpochRecord> log;
  int best_epoch = 0;
  double best_exact_match = 0;
};

// Fraction of examples whose predicted rewrite equals the gold rewrite.
double ExactMatch(const Model &model, std::span<const LabeledExample> examples,
                  bool parallel = true);

// Adam over shuffled minibatches, dropout during training only, early
// stopping after config.patience epochs without improvement, at most
// config.max_epochs epochs. The vocabulary is built from `train`. Model
// selection uses `valid`, or `train` when `valid` is empty.
// Throws InvalidInputError on empty training data and DivergenceError on a
// non-finite loss.
TrainResult Train(std::span<const LabeledExample> train,
                  std::span<const LabeledExample> valid, const ModelConfig &config,
                  const TrainOptions &options = {});

}  // namespace qrw

#endif  // QRW_MODEL_TRAINER_HPP_
