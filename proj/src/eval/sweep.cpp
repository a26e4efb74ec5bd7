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


#include "qrw/eval/sweep.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "qrw/errors.hpp"
#include "qrw/eval/evaluate.hpp"
#include "qrw/model/trainer.hpp"

namespace qrw {

ModelFactory TrainingFactory(const ModelConfig &config, bool parallel) {
  return [config, parallel](std::span<const LabeledExample> train,
                            std::span<const LabeledExample> valid) {
    TrainOptions o;
    o.parallel = parallel;
    auto r = Train(train, valid, config, o);
    return std::make_pair(std::move(r.best), static_cast<int>(r.log.size()));
  };
}

std::vector<SweepPoint> CompositionSweep(const SweepData &data,
                                         const std::vector<std::size_t> &sizes,
                                         const ModelFactory &factory) {
  if (std::find(sizes.begin(), sizes.end(), 0) == sizes.end()) {
    throw InvalidInputError("sweep sizes must include 0");
  }
  if (data.comp_test.empty()) throw InvalidInputError("compositional test set is empty");
  for (auto s : sizes) {
    if (s > data.comp_train.size()) {
      throw InvalidInputError("sweep size " + std::to_string(s) + " exceeds the " +
                              std::to_string(data.comp_train.size()) +
                              " available compositional examples");
    }
  }
  std::set<std::string> train_templates;
  for (const auto &ex : data.comp_train) train_templates.insert(ex.template_id);
  for (const auto &ex : data.comp_test) {
    if (train_templates.count(ex.template_id)) {
      throw InvalidInputError("template " + ex.template_id +
                              " appears in both compositional train and test");
    }
  }

  const double oracle = Evaluate(OraclePredictor(), data.comp_test).total.percent();
  std::vector<SweepPoint> points;
  for (auto s : sizes) {
    std::vector<LabeledExample> train(data.single_train.begin(), data.single_train.end());
    train.insert(train.end(), data.comp_train.begin(),
                 data.comp_train.begin() + static_cast<std::ptrdiff_t>(s));
    auto [model, epochs] = factory(train, data.single_valid);
    SweepPoint p;
    p.size = s;
    p.exact_match = Evaluate(ModelPredictor(model), data.comp_test).total.percent();
    p.oracle_exact_match = oracle;
    p.train_examples = train.size();
    p.epochs = epochs;
    points.push_back(p);
  }
  return points;
}

nlohmann::json SweepToJson(const std::vector<SweepPoint> &points) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto &p : points) {
    j.push_back({{"size", p.size},
                 {"exact_match", p.exact_match},
                 {"oracle_exact_match", p.oracle_exact_match},
                 {"train_examples", p.train_examples},
                 {"epochs", p.epochs}});
  }
  return j;
}

std::vector<SweepPoint> SweepFromJson(const nlohmann::json &j) {
  std::vector<SweepPoint> out;
  try {
    for (const auto &r : j) {
      SweepPoint p;
      p.size = r.at("size");
      p.exact_match = r.at("exact_match");
      p.oracle_exact_match = r.at("oracle_exact_match");
      p.train_examples = r.at("train_examples");
      p.epochs = r.at("epochs");
      out.push_back(p);
    }
  } catch (const nlohmann::json::exception &e) {
    throw InvalidInputError(std::string("malformed sweep record: ") + e.what());
  }
  return out;
}

std::string SweepPlotTable(const std::vector<SweepPoint> &points) {
  std::ostringstream out;
  out << "size\taccuracy\n";
  for (const auto &p : points) out << p.size << '\t' << p.exact_match << '\n';
  return out.str();
}

}  // namespace qrw
