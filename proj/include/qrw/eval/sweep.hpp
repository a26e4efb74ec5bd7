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


#ifndef QRW_EVAL_SWEEP_HPP_
#define QRW_EVAL_SWEEP_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qrw/datagen.hpp"
#include "qrw/model/model.hpp"

namespace qrw {

struct SweepPoint {
  std::size_t size = 0;         // compositional examples added to training
  double exact_match = 0;       // percent on the compositional test set
  double oracle_exact_match = 0;  // gold programs through the engine
  std::size_t train_examples = 0;
  int epochs = 0;
};

struct SweepData {
  std::span<const LabeledExample> single_train;
  std::span<const LabeledExample> single_valid;
  std::span<const LabeledExample> comp_train;  // prefixes of this are added
  std::span<const LabeledExample> comp_test;
};

// Trains a model on the given data; returns it and the epochs run.
using ModelFactory = std::function<std::pair<Model, int>(
    std::span<const LabeledExample> train, std::span<const LabeledExample> valid)>;

// Default factory: Train() with `config`, best-by-validation model.
ModelFactory TrainingFactory(const ModelConfig &config, bool parallel = true);

// For each size s (must include 0) trains on single_train plus the first s
// comp_train examples and evaluates on comp_test. Throws InvalidInputError
// when s exceeds comp_train, sizes lack 0, or comp_test shares a template
// with comp_train.
std::vector<SweepPoint> CompositionSweep(const SweepData &data,
                                         const std::vector<std::size_t> &sizes,
                                         const ModelFactory &factory);

nlohmann::json SweepToJson(const std::vector<SweepPoint> &points);
std::vector<SweepPoint> SweepFromJson(const nlohmann::json &j);
// "size\taccuracy" lines for plotting.
std::string SweepPlotTable(const std::vector<SweepPoint> &points);

}  // namespace qrw

#endif  // QRW_EVAL_SWEEP_HPP_
