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


#ifndef QRW_DATAGEN_HPP_
#define QRW_DATAGEN_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qrw/catalog.hpp"
#include "qrw/edit_engine.hpp"
#include "qrw/templates.hpp"

namespace qrw {

enum class Split { kTrain, kValid, kTest };

std::string_view SplitName(Split s);  // "TRAIN", "VALID", "TEST"
std::optional<Split> ParseSplit(std::string_view name);

struct LabeledExample {
  std::string id;
  std::string template_id;
  std::set<UseCase> use_cases;
  std::vector<std::string> context;
  std::vector<std::string> followup;
  std::vector<std::string> rewrite;
  EditProgram program;
  Split split = Split::kTrain;

  TokenSequence Sequence() const;
  friend bool operator==(const LabeledExample &, const LabeledExample &) = default;
};

// Use-case pairs that compositional templates may combine.
inline constexpr std::array<std::pair<UseCase, UseCase>, 5> kChallengePairs = {{
    {UseCase::kIntent, UseCase::kEntity},
    {UseCase::kEntity, UseCase::kRepair},
    {UseCase::kDisfluency, UseCase::kSteering},
    {UseCase::kIntent, UseCase::kDisfluency},
    {UseCase::kRepair, UseCase::kDisfluency},
}};

bool IsChallengePair(const std::set<UseCase> &use_cases);

// 8:1:1 with floor for train and valid; test takes the remainder.
struct SplitSizes {
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t test = 0;
};
SplitSizes ComputeSplitSizes(std::size_t n);

// splitmix64 mix of (seed, stream, index).
std::uint64_t ExampleSeed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index);

// Label constraints the model can represent: a single-token replacement must
// replace a single token, because the pointer head reads the replaced start
// and end from the same row.
bool Representable(const EditProgram &program);

// Checks a labeled example end to end: validation, engine round-trip, and
// non-empty edits for each declared use case. Returns an error message or
// nullopt.
std::optional<std::string> CheckExample(const LabeledExample &ex);

class DataGenerator {
 public:
  DataGenerator(Catalogs catalogs, std::vector<QueryTemplate> templates);

  // Loads <root>/templates plus the catalogs under <root>.
  static DataGenerator FromDirectory(const std::filesystem::path &root);

  // Single-task templates of `use_case`, entities from both pools.
  std::vector<LabeledExample> GenerateSingleTask(UseCase use_case, std::size_t n,
                                                 std::uint64_t seed) const;

  // TRAIN and VALID draw train-pool templates and entities, TEST draws the
  // eval pool. Throws InvalidInputError when a pool has no templates.
  std::vector<LabeledExample> GenerateCompositional(std::size_t n,
                                                    std::uint64_t seed) const;

  // One verified instance of `tpl`. Entities come from `pool`, or from both
  // pools when unset. Resamples fillings that are not representable.
  LabeledExample Sample(const QueryTemplate &tpl, std::optional<Pool> pool,
                        std::mt19937_64 &rng) const;

  const std::vector<QueryTemplate> &templates() const { return templates_; }
  const Catalogs &catalogs() const { return catalogs_; }

 private:
  std::vector<const QueryTemplate *> Eligible(const std::set<UseCase> &use_cases,
                                              std::optional<Pool> pool) const;
  std::vector<LabeledExample> Generate(
      std::size_t n, std::uint64_t seed, std::uint64_t stream,
      const std::string &id_prefix,
      const std::array<std::vector<const QueryTemplate *>, 3> &by_split,
      const std::array<std::optional<Pool>, 3> &pool_by_split) const;

  Catalogs catalogs_;
  std::vector<QueryTemplate> templates_;
};

}  // namespace qrw

#endif  // QRW_DATAGEN_HPP_
