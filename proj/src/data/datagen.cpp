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


#include "qrw/datagen.hpp"

#include <cstdio>
#include <exception>

#include "qrw/errors.hpp"

namespace qrw {

namespace {

constexpr int kMaxResamples = 200;
constexpr std::uint64_t kCompositionalStream = 100;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::string_view SplitName(Split s) {
  switch (s) {
    case Split::kTrain: return "TRAIN";
    case Split::kValid: return "VALID";
    case Split::kTest: return "TEST";
  }
  return "?";
}

std::optional<Split> ParseSplit(std::string_view name) {
  for (Split s : {Split::kTrain, Split::kValid, Split::kTest}) {
    if (SplitName(s) == name) return s;
  }
  return std::nullopt;
}

TokenSequence LabeledExample::Sequence() const {
  return ConcatTurns(context, followup);
}

bool IsChallengePair(const std::set<UseCase> &use_cases) {
  for (const auto &[a, b] : kChallengePairs) {
    if (use_cases == std::set<UseCase>{a, b}) return true;
  }
  return false;
}

SplitSizes ComputeSplitSizes(std::size_t n) {
  SplitSizes s;
  s.train = n * 8 / 10;
  s.valid = n / 10;
  s.test = n - s.train - s.valid;
  return s;
}

std::uint64_t ExampleSeed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index) {
  return SplitMix64(SplitMix64(SplitMix64(seed) ^ stream) ^ index);
}

bool Representable(const EditProgram &program) {
  for (const auto &e : program) {
    if (e.substitution && e.substitution->replacement.length() == 1 &&
        e.substitution->replaced.length() != 1) {
      return false;
    }
  }
  return true;
}

std::optional<std::string> CheckExample(const LabeledExample &ex) {
  try {
    const auto seq = ex.Sequence();
    const auto report = ValidateProgram(seq, ex.program);
    if (!report.ok()) {
      return "invalid program: " + report.violations.front().detail;
    }
    const auto result = ApplyProgram(seq, ex.program);
    if (result.tokens != ex.rewrite) {
      return "round-trip mismatch: got '" + JoinTokens(result.tokens) +
             "', want '" + JoinTokens(ex.rewrite) + "'";
    }
    for (UseCase u : ex.use_cases) {
      if (ex.program[u].empty()) {
        return "no edits for " + std::string(UseCaseName(u));
      }
    }
    for (const auto &e : ex.program) {
      if (!e.empty() && !ex.use_cases.count(e.use_case)) {
        return "edits for undeclared " + std::string(UseCaseName(e.use_case));
      }
    }
  } catch (const Error &e) {
    return std::string(e.what());
  }
  return std::nullopt;
}

DataGenerator::DataGenerator(Catalogs catalogs,
                             std::vector<QueryTemplate> templates)
    : catalogs_(std::move(catalogs)), templates_(std::move(templates)) {
  for (const auto &t : templates_) {
    if (t.use_cases.size() == 2 && !IsChallengePair(t.use_cases)) {
      throw InvalidInputError("template " + t.id + " combines a non-challenge pair");
    }
    for (const auto &key : t.SlotKeys()) {
      const std::string d = SlotDomain(key);
      if (!catalogs_.HasDomain(d) && !catalogs_.HasLexicon(d)) {
        throw InvalidInputError("template " + t.id + " uses unknown slot {" + key + "}");
      }
    }
  }
}

DataGenerator DataGenerator::FromDirectory(const std::filesystem::path &root) {
  return DataGenerator(Catalogs::Load(root), LoadTemplates(root / "templates"));
}

LabeledExample DataGenerator::Sample(const QueryTemplate &tpl,
                                     std::optional<Pool> pool,
                                     std::mt19937_64 &rng) const {
  const auto keys = tpl.SlotKeys();
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    SlotFilling filling;
    std::map<std::string, std::set<std::size_t>> used;
    for (const auto &key : keys) {
      const std::string d = SlotDomain(key);
      Entity value;
      if (catalogs_.HasDomain(d)) {
        const auto &list = pool ? catalogs_.Entities(d, *pool) : catalogs_.AllEntities(d);
        if (list.size() <= used[d].size()) {
          throw InvalidInputError("insufficient catalog entries for domain '" + d + "'");
        }
        std::size_t pick;
        do {
          pick = std::uniform_int_distribution<std::size_t>(0, list.size() - 1)(rng);
        } while (used[d].count(pick));
        used[d].insert(pick);
        value = list[pick];
      } else {
        const auto &list = catalogs_.Lexicon(d);
        if (list.size() <= used[d].size()) {
          throw InvalidInputError("insufficient lexicon entries for '" + d + "'");
        }
        std::size_t pick;
        do {
          pick = std::uniform_int_distribution<std::size_t>(0, list.size() - 1)(rng);
        } while (used[d].count(pick));
        used[d].insert(pick);
        value.tokens = list[pick];
      }
      filling.emplace(key, std::move(value));
    }

    Instance inst = Instantiate(tpl, filling);
    if (!Representable(inst.program)) continue;
    LabeledExample ex;
    ex.template_id = tpl.id;
    ex.use_cases = tpl.use_cases;
    ex.context = std::move(inst.context);
    ex.followup = std::move(inst.followup);
    ex.rewrite = std::move(inst.rewrite);
    ex.program = std::move(inst.program);
    if (auto err = CheckExample(ex)) {
      throw InvalidInputError("template " + tpl.id + ": " + *err);
    }
    return ex;
  }
  throw InvalidInputError("template " + tpl.id +
                          ": no representable filling found");
}

std::vector<const QueryTemplate *> DataGenerator::Eligible(
    const std::set<UseCase> &use_cases, std::optional<Pool> pool) const {
  std::vector<const QueryTemplate *> out;
  for (const auto &t : templates_) {
    if (t.pool != pool) continue;
    if (use_cases.empty() ? t.use_cases.size() == 2 : t.use_cases == use_cases) {
      out.push_back(&t);
    }
  }
  return out;
}

std::vector<LabeledExample> DataGenerator::Generate(
    std::size_t n, std::uint64_t seed, std::uint64_t stream,
    const std::string &id_prefix,
    const std::array<std::vector<const QueryTemplate *>, 3> &by_split,
    const std::array<std::optional<Pool>, 3> &pool_by_split) const {
  if (n == 0) throw InvalidInputError("example count must be at least 1");
  const auto sizes = ComputeSplitSizes(n);
  std::vector<LabeledExample> out(n);
  std::vector<std::exception_ptr> errors(n);

#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      const int split = i < sizes.train ? 0 : (i < sizes.train + sizes.valid ? 1 : 2);
      std::mt19937_64 rng(ExampleSeed(seed, stream, i));
      const auto &pool = by_split[split];
      const auto *tpl =
          pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      auto ex = Sample(*tpl, pool_by_split[split], rng);
      char buf[32];
      std::snprintf(buf, sizeof(buf), "-%06zu", i);
      ex.id = id_prefix + buf;
      ex.split = static_cast<Split>(split);
      out[i] = std::move(ex);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<LabeledExample> DataGenerator::GenerateSingleTask(
    UseCase use_case, std::size_t n, std::uint64_t seed) const {
  if (Index(use_case) >= kNumUseCases) throw InvalidInputError("unknown use case");
  const auto tpls = Eligible({use_case}, std::nullopt);
  if (tpls.empty()) {
    throw InvalidInputError("no templates for " + std::string(UseCaseName(use_case)));
  }
  return Generate(n, seed, Index(use_case), std::string(UseCaseName(use_case)),
                  {tpls, tpls, tpls}, {std::nullopt, std::nullopt, std::nullopt});
}

std::vector<LabeledExample> DataGenerator::GenerateCompositional(
    std::size_t n, std::uint64_t seed) const {
  const auto train = Eligible({}, Pool::kTrain);
  const auto eval = Eligible({}, Pool::kEval);
  if (train.empty()) throw InvalidInputError("train template pool exhausted");
  if (eval.empty()) throw InvalidInputError("eval template pool exhausted");
  return Generate(n, seed, kCompositionalStream, "COMP", {train, train, eval},
                  {Pool::kTrain, Pool::kTrain, Pool::kEval});
}

}  // namespace qrw
