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


#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "qrw/datagen.hpp"
#include "qrw/errors.hpp"
#include "qrw/model/checkpoint.hpp"
#include "qrw/model/trainer.hpp"

namespace qrw {
namespace {

const DataGenerator &Gen() {
  static const DataGenerator gen = DataGenerator::FromDirectory(QRW_DATA_DIR);
  return gen;
}

std::vector<LabeledExample> Mixed(std::size_t per_use_case, std::uint64_t seed) {
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
  c.batch_size = 8;
  c.max_epochs = 3;
  return c;
}

std::filesystem::path TempPath(const std::string &name) {
  return std::filesystem::temp_directory_path() / ("qrw_trainer_test_" + name);
}

std::string ReadBytes(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void WriteBytes(const std::filesystem::path &p, const std::string &bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Model SmallModel() {
  const auto data = Mixed(10, 3);
  return Model::Create(TinyConfig(), Vocabulary::Build(data));
}

TEST_CASE("checkpoint save, load, save is byte-identical") {
  const auto m = SmallModel();
  const auto a = TempPath("a.ckpt");
  const auto b = TempPath("b.ckpt");
  SaveCheckpoint(m, a);
  const auto loaded = LoadCheckpoint(a);
  SaveCheckpoint(loaded, b);
  CHECK(ReadBytes(a) == ReadBytes(b));
  CHECK(loaded.vocab == m.vocab);
  CHECK(loaded.config.ToText() == m.config.ToText());
  CHECK(loaded.params.flat() == m.params.flat());
}

TEST_CASE("checkpoint header is little-endian") {
  const auto bytes = SerializeCheckpoint(SmallModel());
  REQUIRE(bytes.size() > 12);
  CHECK(bytes.substr(0, 8) == std::string("QRWCKPT\0", 8));
  CHECK(bytes[8] == 1);
  CHECK(bytes[9] == 0);
  CHECK(bytes[10] == 0);
  CHECK(bytes[11] == 0);
}

TEST_CASE("corrupt checkpoints are rejected") {
  const auto good = SerializeCheckpoint(SmallModel());
  SUBCASE("magic") {
    auto bad = good;
    bad[0] = 'X';
    CHECK_THROWS_AS(DeserializeCheckpoint(bad), CheckpointError);
  }
  SUBCASE("version") {
    auto bad = good;
    bad[8] = 7;
    CHECK_THROWS_WITH_AS(DeserializeCheckpoint(bad), doctest::Contains("version"),
                         CheckpointError);
  }
  SUBCASE("truncated") {
    CHECK_THROWS_AS(DeserializeCheckpoint(good.substr(0, good.size() - 3)),
                    CheckpointError);
  }
  SUBCASE("trailing bytes") {
    CHECK_THROWS_AS(DeserializeCheckpoint(good + "x"), CheckpointError);
  }
  SUBCASE("shape mismatch") {
    // Same weights, header claims a different hidden size.
    auto bad = good;
    const auto at = bad.find("hidden_dim = 12");
    REQUIRE(at != std::string::npos);
    bad[at + 14] = '3';
    CHECK_THROWS_AS(DeserializeCheckpoint(bad), CheckpointError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(LoadCheckpoint(TempPath("does_not_exist")), CheckpointError);
  }
}

TEST_CASE("empty training set is rejected") {
  CHECK_THROWS_AS(Train({}, {}, TinyConfig()), InvalidInputError);
}

TEST_CASE("seeded training is deterministic and makes progress") {
  const auto train = Mixed(16, 5);
  const auto valid = Mixed(4, 6);
  const auto a = Train(train, valid, TinyConfig());
  const auto b = Train(train, valid, TinyConfig());
  REQUIRE(a.log.size() == 3);
  CHECK(a.last.params.flat() == b.last.params.flat());
  CHECK(a.best_exact_match == b.best_exact_match);
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    CHECK(a.log[i].loss.total == b.log[i].loss.total);
    CHECK(a.log[i].valid_exact_match == b.log[i].valid_exact_match);
    CHECK(a.log[i].epoch == static_cast<int>(i) + 1);
  }
  CHECK(a.log.back().loss.total < a.log.front().loss.total);
}

TEST_CASE("serial and parallel training agree") {
  const auto train = Mixed(8, 9);
  TrainOptions serial;
  serial.parallel = false;
  auto c = TinyConfig();
  c.max_epochs = 1;
  const auto a = Train(train, {}, c, serial);
  const auto b = Train(train, {}, c);
  const double diff = (a.last.params.flat() - b.last.params.flat()).cwiseAbs().maxCoeff();
  CHECK(diff < 1e-4);
}

TEST_CASE("training log records carry the loss breakdown") {
  const auto train = Mixed(8, 11);
  auto c = TinyConfig();
  c.max_epochs = 1;
  std::vector<nlohmann::json> seen;
  TrainOptions o;
  o.on_epoch = [&](const EpochRecord &r) { seen.push_back(r.ToJson()); };
  const auto res = Train(train, {}, c, o);
  REQUIRE(seen.size() == 1);
  const auto &j = seen[0];
  for (const char *k : {"epoch", "L_RD", "L_RR", "L_Del", "L", "valid_exact_match"}) {
    CHECK(j.contains(k));
  }
  CHECK(j["L"].get<double>() ==
        doctest::Approx(j["L_RD"].get<double>() + j["L_RR"].get<double>() +
                        j["L_Del"].get<double>()));
}

TEST_CASE("resuming reproduces an uninterrupted run bit for bit") {
  const auto train = Mixed(12, 21);
  const auto valid = Mixed(3, 22);
  auto c = TinyConfig();
  c.max_epochs = 4;
  c.patience = 100;
  const auto full = Train(train, valid, c);

  const auto state = TempPath("resume.state");
  // Interrupt after two epochs; the state is written before the callback.
  std::filesystem::remove(state);
  TrainOptions interrupted;
  interrupted.state_path = state;
  int calls = 0;
  interrupted.on_epoch = [&](const EpochRecord &) {
    if (++calls == 2) throw std::runtime_error("stop");
  };
  CHECK_THROWS_AS(Train(train, valid, c, interrupted), std::runtime_error);
  TrainOptions resume;
  resume.state_path = state;
  resume.resume = true;
  const auto resumed = Train(train, valid, c, resume);
  REQUIRE(resumed.log.size() == 4);
  CHECK(resumed.last.params.flat() == full.last.params.flat());
  CHECK(resumed.best.params.flat() == full.best.params.flat());
  CHECK(resumed.best_epoch == full.best_epoch);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(resumed.log[i].loss.total == full.log[i].loss.total);
  }
}

TEST_CASE("resume may extend the epoch cap") {
  const auto train = Mixed(6, 33);
  auto c = TinyConfig();
  c.max_epochs = 2;
  c.patience = 100;
  const auto full = Train(train, {}, c);
  const auto state = TempPath("extend.state");
  std::filesystem::remove(state);
  TrainOptions o;
  o.state_path = state;
  auto shorter = c;
  shorter.max_epochs = 1;
  Train(train, {}, shorter, o);
  o.resume = true;
  const auto resumed = Train(train, {}, c, o);
  CHECK(SerializeCheckpoint(resumed.last) == SerializeCheckpoint(full.last));
  CHECK(SerializeCheckpoint(resumed.best) == SerializeCheckpoint(full.best));
}

TEST_CASE("resume rejects a state written with another config") {
  const auto train = Mixed(4, 31);
  auto c = TinyConfig();
  c.max_epochs = 1;
  const auto state = TempPath("mismatch.state");
  TrainOptions o;
  o.state_path = state;
  Train(train, {}, c, o);
  c.learning_rate = 1e-3;
  o.resume = true;
  CHECK_THROWS_AS(Train(train, {}, c, o), CheckpointError);
}

TEST_CASE("a diverging run aborts") {
  const auto train = Mixed(8, 41);
  const auto c = TinyConfig();
  auto init = Model::Create(c, Vocabulary::Build(train));
  init.params.flat()[init.params.layout().spec(init.params.layout().heads[0].rd_b).offset] =
      std::nanf("");
  TrainOptions o;
  o.initial = &init;
  CHECK_THROWS_WITH_AS(Train(train, {}, c, o), doctest::Contains("epoch 1, step 1"),
                       DivergenceError);
  auto other = c;
  other.hidden_dim = 10;
  CHECK_THROWS_AS(Train(train, {}, other, o), InvalidInputError);
}

TEST_CASE("load then evaluate matches the saved model") {
  const auto train = Mixed(12, 51);
  const auto valid = Mixed(6, 52);
  auto c = TinyConfig();
  c.max_epochs = 2;
  const auto res = Train(train, valid, c);
  const auto path = TempPath("eval.ckpt");
  SaveCheckpoint(res.best, path);
  const auto loaded = LoadCheckpoint(path);
  CHECK(ExactMatch(loaded, valid) == ExactMatch(res.best, valid));
  CHECK(ExactMatch(res.best, valid) == doctest::Approx(res.best_exact_match));
}

TEST_CASE("32 examples are memorized") {
  auto data = Mixed(7, 61);
  data.resize(32);
  ModelConfig c;
  c.batch_size = 8;
  c.max_epochs = 200;
  c.patience = 200;
  TrainOptions o;
  o.target_exact_match = 1.0;
  const auto res = Train(data, {}, c, o);
  MESSAGE("memorized after " << res.log.size() << " epochs");
  CHECK(ExactMatch(res.best, data) == 1.0);
}

}  // namespace
}  // namespace qrw
