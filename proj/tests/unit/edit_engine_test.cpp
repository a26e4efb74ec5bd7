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
#include <set>

#include "doctest.h"
#include "fixtures/reference_engine.hpp"
#include "fixtures/worked_examples.hpp"
#include "qrw/edit_engine.hpp"
#include "qrw/errors.hpp"

namespace qrw {
namespace {

TokenSequence Seq(const std::string &ctx, const std::string &fu) {
  const auto c = Tokenize(ctx);
  const auto f = Tokenize(fu);
  return ConcatTurns(c, f);
}

std::string Rewrite(const TokenSequence &seq, const EditProgram &p) {
  return JoinTokens(ApplyProgram(seq, p).tokens);
}

TEST_CASE("concat places the separator between non-empty turns") {
  const auto seq = Seq("How far is San Jose by car", "I meant San Francisco");
  CHECK(seq.size() == 12);
  REQUIRE(seq.sep_index().has_value());
  CHECK(*seq.sep_index() == 7);
  CHECK(seq[7].text == "[SEP]");
  CHECK(seq[7].segment == Segment::kSep);
  for (int i = 0; i < seq.size(); ++i) CHECK(seq[i].id == i);

  const auto disfl = Seq("", "Take me to Suki Sushi no I said Fuki Sushi");
  CHECK(disfl.size() == 10);
  CHECK_FALSE(disfl.sep_index().has_value());

  const auto tiny = Seq("a", "b");
  CHECK(tiny.Texts() == std::vector<std::string>{"a", "[SEP]", "b"});
}

TEST_CASE("concat rejects an empty follow-up and bad tokens") {
  CHECK_THROWS_AS(Seq("a b", ""), InvalidInputError);
  std::vector<std::string> ctx = {"a"};
  std::vector<std::string> bad = {"x y"};
  CHECK_THROWS_AS(ConcatTurns(ctx, bad), InvalidInputError);
  std::vector<std::string> sep = {"[SEP]"};
  CHECK_THROWS_AS(ConcatTurns(ctx, sep), InvalidInputError);
}

TEST_CASE("span classification matches set semantics for every pair, T=6") {
  for (int s1 = 0; s1 < 6; ++s1) for (int e1 = s1 + 1; e1 <= 6; ++e1)
  for (int s2 = 0; s2 < 6; ++s2) for (int e2 = s2 + 1; e2 <= 6; ++e2) {
    const auto a = reference::Ids({s1, e1});
    const auto b = reference::Ids({s2, e2});
    std::set<int> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(both, both.begin()));
    SpanRelation expected;
    if (both.empty()) expected = SpanRelation::kDisjoint;
    else if (a == b) expected = SpanRelation::kEqual;
    else if (reference::Superset(a, b)) expected = SpanRelation::kFirstContainsSecond;
    else if (reference::Superset(b, a)) expected = SpanRelation::kSecondContainsFirst;
    else expected = SpanRelation::kPartialOverlap;
    CHECK(Classify({s1, e1}, {s2, e2}) == expected);
  }
}

TEST_CASE("cross-substitution validity over all span configurations, T=6") {
  // Two substitutions on a separator-free sequence; every placement of four
  // spans. Valid iff every pair is disjoint or nests in a composable way.
  const auto seq = Seq("", "a b c d e f");
  int valid = 0, partial = 0;
  std::vector<Span> spans;
  for (int s = 0; s < 6; ++s) for (int e = s + 1; e <= 6; ++e) spans.push_back({s, e});
  for (const auto &r1 : spans) for (const auto &d1 : spans) {
    if (!r1.Disjoint(d1)) continue;
    for (const auto &r2 : spans) for (const auto &d2 : spans) {
      if (!r2.Disjoint(d2)) continue;
      EditProgram p;
      p[UseCase::kEntity].substitution = Substitution{r1, d1};
      p[UseCase::kRepair].substitution = Substitution{r2, d2};
      const auto R1 = reference::Ids(r1), D1 = reference::Ids(d1);
      const auto R2 = reference::Ids(r2), D2 = reference::Ids(d2);
      auto disjoint = [](const std::set<int> &x, const std::set<int> &y) {
        for (int i : x) if (y.count(i)) return false;
        return true;
      };
      auto nested = [&](const std::set<int> &x, const std::set<int> &y) {
        return disjoint(x, y) || reference::Superset(x, y) ||
               reference::Superset(y, x);
      };
      const bool expected = disjoint(R1, R2) && disjoint(D1, D2) &&
                            nested(R1, D2) && nested(D1, R2);
      const auto report = ValidateProgram(seq, p);
      CHECK(report.ok() == expected);
      valid += expected;
      for (const auto &v : report.violations) {
        partial += v.kind == ViolationKind::kPartialOverlap;
        CHECK(v.use_case == UseCase::kRepair);
      }
    }
  }
  CHECK(valid > 0);
  CHECK(partial > 0);
}

TEST_CASE("validation basics") {
  const auto seq = Seq("How far is San Jose by car", "I meant San Francisco");
  CHECK(ValidateProgram(seq, EditProgram{}).ok());

  EditProgram same;
  same[UseCase::kRepair].substitution = Substitution{{3, 5}, {3, 5}};
  auto r = ValidateProgram(seq, same);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations[0].kind == ViolationKind::kSelfOverlap);

  EditProgram over_sep;
  over_sep[UseCase::kRepair].substitution = Substitution{{6, 9}, {3, 5}};
  r = ValidateProgram(seq, over_sep);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations[0].kind == ViolationKind::kSpanCoversSeparator);

  EditProgram out_of_range;
  out_of_range[UseCase::kRepair].substitution = Substitution{{10, 13}, {3, 5}};
  out_of_range[UseCase::kRepair].deletions = {12};
  r = ValidateProgram(seq, out_of_range);
  CHECK(r.violations.size() == 2);

  EditProgram del_own;
  del_own[UseCase::kRepair].substitution = Substitution{{10, 12}, {3, 5}};
  del_own[UseCase::kRepair].deletions = {4};
  r = ValidateProgram(seq, del_own);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations[0].kind == ViolationKind::kDeletionInOwnSpan);

  EditProgram del_other = del_own;
  del_other[UseCase::kRepair].deletions = {};
  del_other[UseCase::kSteering].deletions = {10};
  r = ValidateProgram(seq, del_other);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations[0].kind == ViolationKind::kDeletionInOtherSpan);
  CHECK(r.violations[0].use_case == UseCase::kSteering);
}

TEST_CASE("dependency order of the composition example") {
  const auto rows = fixtures::WorkedExamples();
  const auto &running = rows.back();
  CHECK(BuildDependencyOrder(running.program) ==
        std::vector<UseCase>{UseCase::kEntity, UseCase::kRepair});

  EditProgram single;
  single[UseCase::kSteering].substitution = Substitution{{0, 1}, {2, 3}};
  CHECK(BuildDependencyOrder(single) == std::vector<UseCase>{UseCase::kSteering});

  // Independent substitutions fall back to canonical order.
  EditProgram two;
  two[UseCase::kSteering].substitution = Substitution{{0, 1}, {2, 3}};
  two[UseCase::kIntent].substitution = Substitution{{4, 5}, {6, 7}};
  CHECK(BuildDependencyOrder(two) ==
        std::vector<UseCase>{UseCase::kIntent, UseCase::kSteering});
}

TEST_CASE("dependency cycle is reported") {
  const auto seq = Seq("", "a b c d e f");
  EditProgram p;
  p[UseCase::kEntity].substitution = Substitution{{0, 2}, {4, 5}};
  p[UseCase::kRepair].substitution = Substitution{{3, 5}, {0, 1}};
  CHECK(ValidateProgram(seq, p).ok());
  CHECK_THROWS_AS(BuildDependencyOrder(p), CyclicDependencyError);
  CHECK_THROWS_AS(ApplyProgram(seq, p), CyclicDependencyError);
}

TEST_CASE("random 3-substitution programs follow the containment edges") {
  std::mt19937_64 rng(7);
  int checked = 0, with_edges = 0;
  while (checked < 300) {
    auto rc = reference::RandomProgram(rng, 12);
    if (!ValidateProgram(rc.seq, rc.program).ok()) continue;
    const auto subs = reference::Subs(rc.program);
    const auto edge = reference::Edges(subs);
    if (reference::TopologicalOrders(edge).empty()) {
      CHECK_THROWS_AS(BuildDependencyOrder(rc.program), CyclicDependencyError);
      continue;
    }
    const auto order = BuildDependencyOrder(rc.program);
    REQUIRE(order.size() == subs.size());
    std::vector<std::size_t> pos(subs.size());
    for (std::size_t i = 0; i < subs.size(); ++i) {
      for (std::size_t k = 0; k < order.size(); ++k) {
        if (order[k] == subs[i].use_case) pos[i] = k;
      }
    }
    bool any = false;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      for (std::size_t j = 0; j < subs.size(); ++j) {
        if (edge[i][j]) {
          CHECK(pos[i] < pos[j]);
          any = true;
        }
      }
    }
    with_edges += any;
    ++checked;
  }
  CHECK(with_edges > 30);
}

TEST_CASE("repair row rewrite") {
  const auto seq = Seq("How far is San Jose by car", "I meant San Francisco");
  EditProgram p;
  p[UseCase::kRepair].substitution = Substitution{{10, 12}, {3, 5}};
  p[UseCase::kRepair].deletions = {7, 8, 9};
  CHECK(Rewrite(seq, p) == "How far is San Francisco by car");
}

TEST_CASE("composition example reproduces both intermediate strings") {
  const auto rows = fixtures::WorkedExamples();
  const auto &running = rows.back();
  const auto result = ApplyProgram(fixtures::Sequence(running), running.program);
  REQUIRE(result.trace.size() == 2);
  CHECK(result.trace[0] ==
        "Who is eldest doctor [SEP] I said Homer Simpson's eldest daughter");
  CHECK(result.trace[1] == "Who is Homer Simpson's eldest daughter [SEP] I said");
  CHECK(JoinTokens(result.tokens) == "Who is Homer Simpson's eldest daughter");
  CHECK(result.dropped.empty());
}

TEST_CASE("every worked example rewrites to its reachable form") {
  for (const auto &row : fixtures::WorkedExamples()) {
    CAPTURE(row.name);
    const auto seq = fixtures::Sequence(row);
    CHECK(ValidateProgram(seq, row.program).ok());
    CHECK(Rewrite(seq, row.program) == row.reachable_rewrite);
  }
}

TEST_CASE("extraction") {
  // Steering: separator deleted, whole sequence survives.
  const auto rows = fixtures::WorkedExamples();
  CHECK(Rewrite(fixtures::Sequence(rows[0]), rows[0].program) ==
        "Play Sweeny Todd In my living room");
  // Entity carryover keeps the separator; only the follow-up survives.
  CHECK(Rewrite(fixtures::Sequence(rows[3]), rows[3].program) ==
        "How long does it take to drive Rocket Sushi");

  std::vector<TokenCell> chain = {{0, "a", Segment::kContext, true},
                                  {1, "[SEP]", Segment::kSep, true},
                                  {2, "b", Segment::kFollowup, true}};
  CHECK_THROWS_AS(ExtractRewrite(chain), EmptyRewriteError);
  chain[0].deleted = false;
  CHECK(ExtractRewrite(chain) == std::vector<std::string>{"a"});
  chain[1].deleted = false;
  CHECK_THROWS_AS(ExtractRewrite(chain), EmptyRewriteError);
}

TEST_CASE("empty program returns the follow-up verbatim") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    auto rc = reference::RandomProgram(rng, 14);
    CHECK(ApplyProgram(rc.seq, EditProgram{}).tokens == rc.seq.FollowupTexts());
  }
}

TEST_CASE("invalid edits are dropped and the rest applied") {
  const auto seq = Seq("How far is San Jose by car", "I meant San Francisco");
  EditProgram p;
  p[UseCase::kRepair].substitution = Substitution{{10, 12}, {3, 5}};
  p[UseCase::kRepair].deletions = {7, 8, 9};
  p[UseCase::kSteering].substitution = Substitution{{4, 6}, {0, 1}};  // partial
  const auto result = ApplyProgram(seq, p);
  CHECK(JoinTokens(result.tokens) == "How far is San Francisco by car");
  REQUIRE_FALSE(result.dropped.empty());
  CHECK(result.dropped[0].kind == ViolationKind::kPartialOverlap);
  CHECK_FALSE(result.effective[UseCase::kSteering].substitution.has_value());
}

TEST_CASE("properties over random valid programs") {
  std::mt19937_64 rng(3);
  int n = 0;
  while (n < 400) {
    auto rc = reference::RandomProgram(rng, 12);
    if (!ValidateProgram(rc.seq, rc.program).ok()) continue;
    std::vector<UseCase> order;
    try {
      order = BuildDependencyOrder(rc.program);
    } catch (const CyclicDependencyError &) {
      continue;
    }
    ++n;
    std::optional<std::vector<std::string>> base;
    try {
      base = ApplyProgram(rc.seq, rc.program).tokens;
    } catch (const EmptyRewriteError &) {
    }
    // Deletion timing does not matter.
    for (int step = 0; step <= static_cast<int>(order.size()); ++step) {
      ApplyOptions opt;
      opt.deletion_after_step = step;
      std::optional<std::vector<std::string>> got;
      try {
        got = ApplyProgram(rc.seq, rc.program, opt).tokens;
      } catch (const EmptyRewriteError &) {
      }
      CHECK(got == base);
    }
    // Closure: every output token is an input token.
    if (base) {
      std::multiset<std::string> pool;
      for (const auto &c : rc.seq.cells()) pool.insert(c.text);
      for (const auto &t : *base) {
        auto it = pool.find(t);
        REQUIRE(it != pool.end());
        pool.erase(it);
      }
    }
  }
}

TEST_CASE("independent substitutions commute") {
  std::mt19937_64 rng(5);
  int n = 0;
  while (n < 200) {
    auto rc = reference::RandomProgram(rng, 12);
    if (!ValidateProgram(rc.seq, rc.program).ok()) continue;
    const auto subs = reference::Subs(rc.program);
    const auto edge = reference::Edges(subs);
    bool independent = true;
    for (const auto &row : edge) for (bool e : row) independent = independent && !e;
    if (!independent) continue;
    ++n;
    std::vector<UseCase> order;
    for (const auto &s : subs) order.push_back(s.use_case);
    std::sort(order.begin(), order.end());
    std::optional<std::string> first;
    bool have = false;
    do {
      ApplyOptions opt;
      opt.order = order;
      std::optional<std::string> got;
      try {
        got = JoinTokens(ApplyProgram(rc.seq, rc.program, opt).tokens);
      } catch (const EmptyRewriteError &) {
      }
      if (!have) {
        first = got;
        have = true;
      }
      CHECK(got == first);
    } while (std::next_permutation(order.begin(), order.end()));
  }
}

}  // namespace
}  // namespace qrw
