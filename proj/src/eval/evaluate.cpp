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


#include "qrw/eval/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "qrw/errors.hpp"
#include "qrw/eval/metrics.hpp"

namespace qrw {

namespace {

constexpr std::array<std::string_view, kNumFailureKinds> kFailureNames = {
    "wrong_substitution", "wrong_deletion", "dropped_edit", "extraction_error"};

Prediction ApplyFailSoft(const TokenSequence &seq, EditProgram program) {
  Prediction p{std::move(program), std::nullopt};
  try {
    p.result = ApplyProgram(seq, p.program);
  } catch (const EmptyRewriteError &) {
  } catch (const CyclicDependencyError &) {
  }
  return p;
}

std::vector<Prediction> Map(std::span<const LabeledExample> examples,
                            const std::function<EditProgram(const LabeledExample &)> &f) {
  std::vector<Prediction> out;
  out.reserve(examples.size());
  for (const auto &ex : examples) out.push_back(ApplyFailSoft(ex.Sequence(), f(ex)));
  return out;
}

// Canonical order: single use cases first, then pairs, each by first index.
std::vector<UseCase> SortKey(const std::string &tag) {
  std::vector<UseCase> key;
  std::stringstream ss(tag);
  std::string part;
  while (std::getline(ss, part, '+')) key.push_back(*ParseUseCase(part));
  return key;
}

}  // namespace

std::string_view FailureName(FailureKind k) { return kFailureNames[static_cast<int>(k)]; }

Predictor ModelPredictor(const Model &model, bool parallel) {
  return [&model, parallel](std::span<const LabeledExample> examples) {
    std::vector<TokenSequence> inputs;
    inputs.reserve(examples.size());
    for (const auto &ex : examples) inputs.push_back(ex.Sequence());
    return PredictRewrites(model, inputs, parallel);
  };
}

Predictor OraclePredictor() {
  return [](std::span<const LabeledExample> examples) {
    return Map(examples, [](const LabeledExample &ex) { return ex.program; });
  };
}

Predictor EmptyPredictor() {
  return [](std::span<const LabeledExample> examples) {
    return Map(examples, [](const LabeledExample &) { return EditProgram{}; });
  };
}

std::optional<FailureKind> ClassifyFailure(const LabeledExample &ex, const Prediction &p) {
  if (!p.result) return FailureKind::kExtractionError;
  if (ExactMatch(p.result->tokens, ex.rewrite)) return std::nullopt;
  if (!p.result->dropped.empty()) return FailureKind::kDroppedEdit;
  std::optional<FailureKind> worst;
  auto rank = [](FailureKind k) {
    switch (k) {
      case FailureKind::kDroppedEdit: return 0;
      case FailureKind::kWrongSubstitution: return 1;
      default: return 2;
    }
  };
  for (UseCase u : kAllUseCases) {
    const auto &gold = ex.program[u];
    const auto &pred = p.result->effective[u];
    if (gold == pred) continue;
    FailureKind k;
    if (!gold.empty() && pred.empty()) {
      k = FailureKind::kDroppedEdit;
    } else if (gold.substitution != pred.substitution) {
      k = FailureKind::kWrongSubstitution;
    } else {
      k = FailureKind::kWrongDeletion;
    }
    if (!worst || rank(k) < rank(*worst)) worst = k;
  }
  // Same program, different text: the gold rewrite is not what extraction gives.
  return worst.value_or(FailureKind::kExtractionError);
}

double GroupResult::percent() const {
  return count == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(count);
}

const GroupResult *EvalReport::Find(const std::string &tag) const {
  for (const auto &[t, g] : groups) {
    if (t == tag) return &g;
  }
  return nullptr;
}

std::string UseCaseTag(const std::set<UseCase> &use_cases) {
  std::string tag;
  for (UseCase u : use_cases) {
    if (!tag.empty()) tag += '+';
    tag += UseCaseName(u);
  }
  return tag;
}

EvalReport Evaluate(const Predictor &predictor, std::span<const LabeledExample> examples) {
  if (examples.empty()) throw InvalidInputError("cannot evaluate an empty dataset");
  const auto preds = predictor(examples);
  if (preds.size() != examples.size()) {
    throw InvalidInputError("predictor returned the wrong number of predictions");
  }
  std::map<std::string, GroupResult> by_tag;
  EvalReport r;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto &g = by_tag[UseCaseTag(examples[i].use_cases)];
    const auto failure = ClassifyFailure(examples[i], preds[i]);
    for (GroupResult *t : {&g, &r.total}) {
      ++t->count;
      if (failure) {
        ++t->failures[static_cast<int>(*failure)];
      } else {
        ++t->correct;
      }
    }
  }
  r.groups.assign(by_tag.begin(), by_tag.end());
  std::stable_sort(r.groups.begin(), r.groups.end(), [](const auto &a, const auto &b) {
    const auto ka = SortKey(a.first), kb = SortKey(b.first);
    if (ka.size() != kb.size()) return ka.size() < kb.size();
    return ka < kb;
  });
  double sum = 0;
  for (const auto &[_, g] : r.groups) sum += g.percent();
  r.macro_average = sum / static_cast<double>(r.groups.size());
  return r;
}

namespace {

nlohmann::json GroupToJson(const GroupResult &g) {
  nlohmann::json failures = nlohmann::json::object();
  for (int k = 0; k < kNumFailureKinds; ++k) {
    failures[std::string(kFailureNames[k])] = g.failures[k];
  }
  return {{"count", g.count},
          {"correct", g.correct},
          {"exact_match", g.percent()},
          {"failures", failures}};
}

GroupResult GroupFromJson(const nlohmann::json &j) {
  GroupResult g;
  g.count = j.at("count");
  g.correct = j.at("correct");
  for (int k = 0; k < kNumFailureKinds; ++k) {
    g.failures[k] = j.at("failures").at(std::string(kFailureNames[k]));
  }
  return g;
}

}  // namespace

nlohmann::json ReportToJson(const EvalReport &report) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto &[tag, g] : report.groups) {
    auto j = GroupToJson(g);
    j["use_cases"] = tag;
    groups.push_back(j);
  }
  return {{"groups", groups},
          {"total", GroupToJson(report.total)},
          {"macro_average", report.macro_average}};
}

EvalReport ReportFromJson(const nlohmann::json &j) {
  EvalReport r;
  try {
    for (const auto &g : j.at("groups")) {
      r.groups.emplace_back(g.at("use_cases").get<std::string>(), GroupFromJson(g));
    }
    r.total = GroupFromJson(j.at("total"));
    r.macro_average = j.at("macro_average");
  } catch (const nlohmann::json::exception &e) {
    throw InvalidInputError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string FormatReport(const EvalReport &report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %7s %7s %8s %6s %6s %6s %6s\n", "use case", "count",
                "correct", "EM %", "sub", "del", "drop", "extr");
  out << line;
  auto row = [&](const std::string &name, const GroupResult &g) {
    std::snprintf(line, sizeof(line), "%-24s %7zu %7zu %8.2f %6zu %6zu %6zu %6zu\n",
                  name.c_str(), g.count, g.correct, g.percent(), g.failures[0], g.failures[1],
                  g.failures[2], g.failures[3]);
    out << line;
  };
  for (const auto &[tag, g] : report.groups) row(tag, g);
  row("total", report.total);
  std::snprintf(line, sizeof(line), "%-24s %24.2f\n", "macro average", report.macro_average);
  out << line;
  return out.str();
}

}  // namespace qrw
