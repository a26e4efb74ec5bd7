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


#include <random>

#include "doctest.h"
#include "fixtures/worked_examples.hpp"
#include "qrw/datagen.hpp"
#include "qrw/errors.hpp"
#include "qrw/eval/evaluate.hpp"
#include "qrw/eval/latency.hpp"
#include "qrw/eval/metrics.hpp"
#include "qrw/eval/sweep.hpp"
#include "qrw/model/trainer.hpp"

namespace qrw {
namespace {

const DataGenerator &Gen() {
  static const DataGenerator gen = DataGenerator::FromDirectory(QRW_DATA_DIR);
  return gen;
}

std::vector<LabeledExample> SingleTask(std::size_t per_use_case, std::uint64_t seed) {
  std::vector<LabeledExample> out;
  for (UseCase u : kAllUseCases) {
    auto part = Gen().GenerateSingleTask(u, per_use_case, seed);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

ModelConfig TinyConfig() {
  ModelConfig c;
  c.embed_dim = 16;
  c.hidden_dim = 12;
  c.proj_dim = 8;
  c.batch_size = 16;
  c.max_epochs = 1;
  return c;
}

std::vector<std::string> Words(const std::string &s) { return Tokenize(s); }

TEST_CASE("exact match") {
  const auto bart = Words("How old is Bart Simpson");
  CHECK(ExactMatch(bart, bart));
  CHECK(ExactMatch(std::vector<std::string>{}, std::vector<std::string>{}));
  CHECK_FALSE(ExactMatch(Words("how old is Bart Simpson"), bart));
  CHECK_FALSE(ExactMatch(Words("How old is Bart"), bart));
}

TEST_CASE("exact match is symmetric") {
  std::mt19937_64 rng(3);
  const std::vector<std::string> vocab = {"a", "A", "b", "Bart", "bart", "is"};
  std::uniform_int_distribution<int> len(0, 4), pick(0, 5);
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> a, b;
    for (int k = len(rng); k > 0; --k) a.push_back(vocab[pick(rng)]);
    for (int k = len(rng); k > 0; --k) b.push_back(vocab[pick(rng)]);
    if (i % 3 == 0) b = a;
    CHECK(ExactMatch(a, b) == ExactMatch(b, a));
  }
}

TEST_CASE("oracle pipeline scores 100 on every generated split") {
  auto data = SingleTask(300, 5);
  const auto comp = Gen().GenerateCompositional(500, 6);
  data.insert(data.end(), comp.begin(), comp.end());
  for (Split s : {Split::kTrain, Split::kValid, Split::kTest}) {
    std::vector<LabeledExample> part;
    for (const auto &ex : data) {
      if (ex.split == s) part.push_back(ex);
    }
    const auto r = Evaluate(OraclePredictor(), part);
    CHECK(r.total.correct == part.size());
    for (const auto &[tag, g] : r.groups) {
      CAPTURE(tag);
      CHECK(g.percent() == 100.0);
    }
    CHECK(r.macro_average == 100.0);
  }
}

TEST_CASE("empty programs score the fraction of unchanged follow-ups") {
  const auto data = SingleTask(200, 8);
  std::size_t unchanged = 0;
  for (const auto &ex : data) unchanged += ex.rewrite == ex.followup;
  CHECK(unchanged == 0);
  const auto r = Evaluate(EmptyPredictor(), data);
  CHECK(r.total.correct == unchanged);

  // A hand-built record whose rewrite is its follow-up.
  LabeledExample same;
  same.id = "X";
  same.use_cases = {UseCase::kEntity};
  same.context = Words("Play Thriller");
  same.followup = Words("Who sings Thriller");
  same.rewrite = same.followup;
  auto mixed = data;
  mixed.push_back(same);
  const auto r2 = Evaluate(EmptyPredictor(), mixed);
  CHECK(r2.total.correct == 1);
  CHECK(r2.Find("ENTITY")->correct == 1);
}

TEST_CASE("report layout has five task rows and a macro average") {
  const auto data = SingleTask(50, 9);
  const auto r = Evaluate(EmptyPredictor(), data);
  REQUIRE(r.groups.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(r.groups[i].first == UseCaseName(kAllUseCases[i]));
  }
  std::size_t count = 0;
  for (const auto &[_, g] : r.groups) {
    count += g.count;
    CHECK(g.percent() >= 0.0);
    CHECK(g.percent() <= 100.0);
    std::size_t failed = 0;
    for (auto f : g.failures) failed += f;
    CHECK(failed + g.correct == g.count);
  }
  CHECK(count == data.size());
  CHECK(r.total.count == data.size());
  const auto text = FormatReport(r);
  CHECK(text.find("macro average") != std::string::npos);
  CHECK(text.find("STEERING") != std::string::npos);

  const auto back = ReportFromJson(nlohmann::json::parse(ReportToJson(r).dump()));
  CHECK(ReportToJson(back) == ReportToJson(r));
}

TEST_CASE("compositional groups follow single use cases") {
  auto data = Gen().GenerateCompositional(100, 3);
  const auto single = Gen().GenerateSingleTask(UseCase::kRepair, 10, 3);
  data.insert(data.end(), single.begin(), single.end());
  const auto r = Evaluate(OraclePredictor(), data);
  REQUIRE(!r.groups.empty());
  CHECK(r.groups.front().first == "REPAIR");
  CHECK(r.Find("INTENT+ENTITY") != nullptr);
}

TEST_CASE("evaluating an empty dataset fails") {
  CHECK_THROWS_AS(Evaluate(OraclePredictor(), {}), InvalidInputError);
}

TEST_CASE("failure categories") {
  const auto rows = fixtures::WorkedExamples();
  const auto &repair = rows[4];
  LabeledExample ex;
  ex.use_cases = {UseCase::kRepair};
  ex.context = Words(repair.context);
  ex.followup = Words(repair.followup);
  ex.rewrite = Words(repair.target_rewrite);
  ex.program = repair.program;
  const auto seq = ex.Sequence();
  auto predict = [&](const EditProgram &p) {
    Prediction out{p, std::nullopt};
    try {
      out.result = ApplyProgram(seq, p);
    } catch (const Error &) {
    }
    return out;
  };

  CHECK_FALSE(ClassifyFailure(ex, predict(ex.program)).has_value());
  CHECK(ClassifyFailure(ex, predict(EditProgram{})) == FailureKind::kDroppedEdit);

  auto wrong_sub = ex.program;
  wrong_sub[UseCase::kRepair].substitution = fixtures::Sub(11, 12, 3, 5);
  CHECK(ClassifyFailure(ex, predict(wrong_sub)) == FailureKind::kWrongSubstitution);

  auto wrong_del = ex.program;
  wrong_del[UseCase::kRepair].deletions = {7, 8};
  CHECK(ClassifyFailure(ex, predict(wrong_del)) == FailureKind::kWrongDeletion);

  auto invalid = ex.program;
  invalid[UseCase::kRepair].substitution = fixtures::Sub(10, 12, 4, 11);
  CHECK(ClassifyFailure(ex, predict(invalid)) == FailureKind::kDroppedEdit);

  CHECK(ClassifyFailure(ex, Prediction{ex.program, std::nullopt}) ==
        FailureKind::kExtractionError);
}

struct SweepFixture {
  std::vector<LabeledExample> single_train, single_valid, comp_train, comp_test;
  SweepFixture() {
    for (const auto &ex : SingleTask(40, 12)) {
      (ex.split == Split::kValid ? single_valid : single_train).push_back(ex);
    }
    for (const auto &ex : Gen().GenerateCompositional(100, 13)) {
      if (ex.split == Split::kTrain) comp_train.push_back(ex);
      if (ex.split == Split::kTest) comp_test.push_back(ex);
    }
  }
  SweepData Data() const { return {single_train, single_valid, comp_train, comp_test}; }
};

TEST_CASE("composition sweep emits one row per size with an oracle row") {
  const SweepFixture f;
  const auto factory = TrainingFactory(TinyConfig());
  const auto a = CompositionSweep(f.Data(), {0, 20, 80}, factory);
  REQUIRE(a.size() == 3);
  CHECK(a[0].size == 0);
  CHECK(a[0].train_examples == f.single_train.size());
  CHECK(a[2].train_examples == f.single_train.size() + 80);
  for (const auto &p : a) {
    CHECK(p.oracle_exact_match == 100.0);
    CHECK(p.exact_match >= 0.0);
    CHECK(p.exact_match <= 100.0);
  }
  const auto b = CompositionSweep(f.Data(), {0, 20, 80}, factory);
  CHECK(SweepToJson(a) == SweepToJson(b));
  CHECK(SweepToJson(SweepFromJson(SweepToJson(a))) == SweepToJson(a));
  CHECK(SweepPlotTable(a).rfind("size\taccuracy\n0\t", 0) == 0);

  // The size-0 row is plain multi-task training evaluated on the test set.
  const auto [model, epochs] = factory(f.single_train, f.single_valid);
  CHECK(Evaluate(ModelPredictor(model), f.comp_test).total.percent() == a[0].exact_match);
}

TEST_CASE("composition sweep argument errors") {
  const SweepFixture f;
  const auto factory = TrainingFactory(TinyConfig());
  CHECK_THROWS_AS(CompositionSweep(f.Data(), {100}, factory), InvalidInputError);
  CHECK_THROWS_AS(CompositionSweep(f.Data(), {0, f.comp_train.size() + 1}, factory),
                  InvalidInputError);
  auto leaky = f.Data();
  leaky.comp_test = f.comp_train;
  CHECK_THROWS_AS(CompositionSweep(leaky, {0}, factory), InvalidInputError);
}

TEST_CASE("latency bench") {
  const auto data = SingleTask(20, 14);
  const auto model = Model::Create(TinyConfig(), Vocabulary::Build(data));
  std::vector<TokenSequence> inputs;
  for (std::size_t i = 0; i < data.size(); i += 4) inputs.push_back(data[i].Sequence());
  CHECK_THROWS_AS(LatencyBench(model, inputs, 1, 99), InvalidInputError);
  CHECK_THROWS_AS(LatencyBench(model, {}, 1, 100), InvalidInputError);
  const auto r = LatencyBench(model, inputs, 2, 100);
  CHECK(r.p50_us <= r.p95_us);
  CHECK(r.encoder_calls_per_query == 1.0);
  CHECK(r.queries == inputs.size());
  std::size_t bucketed = 0;
  for (const auto &b : r.buckets) bucketed += b.queries;
  CHECK(bucketed == inputs.size());
  const auto back = LatencyFromJson(nlohmann::json::parse(LatencyToJson(r).dump()));
  CHECK(LatencyToJson(back) == LatencyToJson(r));
  CHECK(FormatLatency(r).find("p50") != std::string::npos);

  const auto rows = EncoderScaling(model, {8, 16}, 20);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].median_us > 0);
}

}  // namespace
}  // namespace qrw
