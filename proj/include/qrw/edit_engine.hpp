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


#ifndef QRW_EDIT_ENGINE_HPP_
#define QRW_EDIT_ENGINE_HPP_

#include <array>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrw/use_case.hpp"

namespace qrw {

inline constexpr std::string_view kSepToken = "[SEP]";

enum class Segment { kContext, kSep, kFollowup };

// One token of the concatenated dialog. id is the original position and never
// changes while the cell moves around during substitution.
struct TokenCell {
  int id = 0;
  std::string text;
  Segment segment = Segment::kFollowup;
  bool deleted = false;
};

// context ++ [SEP] ++ followup. The separator is present iff the context is
// non-empty.
class TokenSequence {
 public:
  TokenSequence() = default;

  const std::vector<TokenCell> &cells() const { return cells_; }
  int size() const { return static_cast<int>(cells_.size()); }
  const TokenCell &operator[](int i) const { return cells_[i]; }
  std::optional<int> sep_index() const { return sep_; }

  std::vector<std::string> Texts() const;
  std::vector<std::string> FollowupTexts() const;

 private:
  friend TokenSequence ConcatTurns(std::span<const std::string>,
                                   std::span<const std::string>);
  std::vector<TokenCell> cells_;
  std::optional<int> sep_;
};

// Throws InvalidInputError on an empty follow-up or on a token that is empty,
// contains whitespace, or equals the separator literal.
TokenSequence ConcatTurns(std::span<const std::string> context,
                          std::span<const std::string> followup);

// Splits on runs of ASCII whitespace.
std::vector<std::string> Tokenize(std::string_view text);
std::string JoinTokens(std::span<const std::string> tokens);

// Half-open token range [start, end) over the original index space.
struct Span {
  int start = 0;
  int end = 0;

  int length() const { return end - start; }
  bool Contains(int i) const { return start <= i && i < end; }
  bool Contains(const Span &o) const {
    return start <= o.start && o.end <= end;
  }
  bool Disjoint(const Span &o) const {
    return end <= o.start || o.end <= start;
  }
  friend bool operator==(const Span &, const Span &) = default;
};

enum class SpanRelation {
  kDisjoint,
  kEqual,
  kFirstContainsSecond,  // strict
  kSecondContainsFirst,  // strict
  kPartialOverlap,
};

SpanRelation Classify(const Span &a, const Span &b);

struct Substitution {
  Span replacement;
  Span replaced;
  friend bool operator==(const Substitution &,
                         const Substitution &) = default;
};

struct UseCaseEdits {
  UseCase use_case = UseCase::kIntent;
  std::optional<Substitution> substitution;
  std::set<int> deletions;

  bool empty() const { return !substitution && deletions.empty(); }
  friend bool operator==(const UseCaseEdits &,
                         const UseCaseEdits &) = default;
};

// Exactly one UseCaseEdits per use case, stored in canonical order.
class EditProgram {
 public:
  EditProgram();

  UseCaseEdits &operator[](UseCase u) { return edits_[Index(u)]; }
  const UseCaseEdits &operator[](UseCase u) const { return edits_[Index(u)]; }

  auto begin() const { return edits_.begin(); }
  auto end() const { return edits_.end(); }

  int NumSubstitutions() const;
  std::set<int> AllDeletions() const;
  bool empty() const;

  friend bool operator==(const EditProgram &, const EditProgram &) = default;

 private:
  std::array<UseCaseEdits, kNumUseCases> edits_;
};

enum class ViolationKind {
  kSpanOutOfRange,
  kSpanCoversSeparator,
  kSelfOverlap,           // a substitution's replacement meets its replaced
  kDeletionOutOfRange,
  kDeletionInOwnSpan,
  kDeletionInOtherSpan,
  kPartialOverlap,
  kIllegalNesting,        // nested spans of a kind that has no composition rule
};

std::string_view ViolationName(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  UseCase use_case;                 // the edit set to drop
  std::optional<UseCase> other;     // counterpart for cross-use-case checks
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::set<UseCase> Offending() const;
};

// Checks every span, deletion, and cross-use-case composition rule against
// T = seq.size(). Cross-use-case violations are attributed to the later use
// case in canonical order, deletion conflicts to the deleting use case.
ValidationReport ValidateProgram(const TokenSequence &seq,
                                 const EditProgram &program);

// Dependency edge before -> after between two substitutions:
//   after.replacement strictly contains before.replaced, or
//   after.replaced contains (or equals) before.replacement.
// The first is the composition dependency proper; the second keeps a
// replacement from being excised before it has been moved out.
bool MustPrecede(const Substitution &before, const Substitution &after);

// Topological order of the program's substitutions; ties go to canonical
// use-case order. Throws CyclicDependencyError.
std::vector<UseCase> BuildDependencyOrder(const EditProgram &program);

struct RewriteResult {
  std::vector<std::string> tokens;
  // Linearization after each substitution step. Excised cells are gone;
  // deletion-flagged cells are still shown since deletion is only applied by
  // extraction.
  std::vector<std::string> trace;
  std::vector<UseCase> applied_order;
  std::vector<Violation> dropped;  // fail-soft record
  EditProgram effective;           // program after dropping invalid edits
};

struct ApplyOptions {
  // Number of substitution steps to run before deletion flags are set. The
  // final rewrite does not depend on it; exposed for property tests.
  int deletion_after_step = 0;
  // When set, substitutions run in this order instead of the dependency
  // order. Must contain exactly the use cases that carry a substitution.
  std::optional<std::vector<UseCase>> order;
};

// Applies deletion flags, then substitutions in dependency order, then
// extracts the rewrite. Invalid use-case edits are dropped (recorded in
// RewriteResult::dropped) and the rest are applied. Throws
// CyclicDependencyError and EmptyRewriteError.
RewriteResult ApplyProgram(const TokenSequence &seq, const EditProgram &program,
                           const ApplyOptions &options = {});

// Runs validation-free substitution and deletion flagging only: returns the
// final cell chain (deletion-flagged cells included) before extraction. The
// program must be valid.
std::vector<TokenCell> ApplyToChain(const TokenSequence &seq,
                                    const EditProgram &program);

// Non-deleted texts after the last surviving separator, or all non-deleted
// texts if none survives. Throws EmptyRewriteError on an empty result.
std::vector<std::string> ExtractRewrite(std::span<const TokenCell> chain);

}  // namespace qrw

#endif  // QRW_EDIT_ENGINE_HPP_
