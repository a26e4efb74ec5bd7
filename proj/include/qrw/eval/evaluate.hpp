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


#ifndef QRW_EVAL_EVALUATE_HPP_
#define QRW_EVAL_EVALUATE_HPP_

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qrw/datagen.hpp"
#include "qrw/model/model.hpp"

namespace qrw {

enum class FailureKind {
  kWrongSubstitution,
  kWrongDeletion,
  kDroppedEdit,
  kExtractionError,
};
inline constexpr int kNumFailureKinds = 4;

std::string_view FailureName(FailureKind k);

// Maps a batch of examples to predictions, one per example in order.
using Predictor = std::function<std::vector<Prediction>(std::span<const LabeledExample>)>;

Predictor ModelPredictor(const Model &model, bool parallel = true);
// Gold programs through the engine.
Predictor OraclePredictor();
// Predicts no edits at all.
Predictor EmptyPredictor();

// Null for a correct prediction.
std::optional<FailureKind> ClassifyFailure(const LabeledExample &ex, const Prediction &p);

struct GroupResult {
  std::size_t count = 0;
  std::size_t correct = 0;
  std::array<std::size_t, kNumFailureKinds> failures{};
  double percent() const;
};

struct EvalReport {
  // Keyed by use-case tag ("INTENT", "ENTITY+INTENT", ...), canonical order.
  std::vector<std::pair<std::string, GroupResult>> groups;
  GroupResult total;
  double macro_average = 0;  // mean of group percentages

  const GroupResult *Find(const std::string &tag) const;
};

// "INTENT", "ENTITY+INTENT": names in canonical order joined by '+'.
std::string UseCaseTag(const std::set<UseCase> &use_cases);

// Throws InvalidInputError on an empty dataset.
EvalReport Evaluate(const Predictor &predictor, std::span<const LabeledExample> examples);

nlohmann::json ReportToJson(const EvalReport &report);
EvalReport ReportFromJson(const nlohmann::json &j);
// One line per group plus a total line, widths fixed.
std::string FormatReport(const EvalReport &report);

}  // namespace qrw

#endif  // QRW_EVAL_EVALUATE_HPP_
