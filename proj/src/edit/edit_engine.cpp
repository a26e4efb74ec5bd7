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


#include "qrw/edit_engine.hpp"

#include <algorithm>
#include <cctype>
#include <list>
#include <map>
#include <sstream>
#include <utility>

#include "qrw/errors.hpp"

namespace qrw {

namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

void CheckToken(const std::string &token) {
  if (token.empty()) throw InvalidInputError("empty token");
  if (std::any_of(token.begin(), token.end(), IsSpace)) {
    throw InvalidInputError("token contains whitespace: '" + token + "'");
  }
  if (token == kSepToken) {
    throw InvalidInputError("separator literal inside a turn");
  }
}

std::string SpanText(const Span &s) {
  return "[" + std::to_string(s.start) + "," + std::to_string(s.end) + ")";
}

}  // namespace

std::vector<std::string> TokenSequence::Texts() const {
  std::vector<std::string> out;
  out.reserve(cells_.size());
  for (const auto &c : cells_) out.push_back(c.text);
  return out;
}

std::vector<std::string> TokenSequence::FollowupTexts() const {
  std::vector<std::string> out;
  for (const auto &c : cells_) {
    if (c.segment == Segment::kFollowup) out.push_back(c.text);
  }
  return out;
}

TokenSequence ConcatTurns(std::span<const std::string> context,
                          std::span<const std::string> followup) {
  if (followup.empty()) throw InvalidInputError("empty follow-up turn");
  TokenSequence seq;
  int id = 0;
  for (const auto &t : context) {
    CheckToken(t);
    seq.cells_.push_back({id++, t, Segment::kContext, false});
  }
  if (!context.empty()) {
    seq.sep_ = id;
    seq.cells_.push_back({id++, std::string(kSepToken), Segment::kSep, false});
  }
  for (const auto &t : followup) {
    CheckToken(t);
    seq.cells_.push_back({id++, t, Segment::kFollowup, false});
  }
  return seq;
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !IsSpace(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string JoinTokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

SpanRelation Classify(const Span &a, const Span &b) {
  if (a.Disjoint(b)) return SpanRelation::kDisjoint;
  if (a == b) return SpanRelation::kEqual;
  if (a.Contains(b)) return SpanRelation::kFirstContainsSecond;
  if (b.Contains(a)) return SpanRelation::kSecondContainsFirst;
  return SpanRelation::kPartialOverlap;
}

EditProgram::EditProgram() {
  for (UseCase u : kAllUseCases) edits_[Index(u)].use_case = u;
}

int EditProgram::NumSubstitutions() const {
  int n = 0;
  for (const auto &e : edits_) n += e.substitution.has_value();
  return n;
}

std::set<int> EditProgram::AllDeletions() const {
  std::set<int> all;
  for (const auto &e : edits_) all.insert(e.deletions.begin(), e.deletions.end());
  return all;
}

bool EditProgram::empty() const {
  return std::all_of(edits_.begin(), edits_.end(),
                     [](const UseCaseEdits &e) { return e.empty(); });
}

std::string_view ViolationName(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kSpanOutOfRange: return "span-out-of-range";
    case ViolationKind::kSpanCoversSeparator: return "span-covers-separator";
    case ViolationKind::kSelfOverlap: return "spans-not-disjoint";
    case ViolationKind::kDeletionOutOfRange: return "deletion-out-of-range";
    case ViolationKind::kDeletionInOwnSpan: return "deletion-in-own-span";
    case ViolationKind::kDeletionInOtherSpan: return "deletion-in-other-span";
    case ViolationKind::kPartialOverlap: return "partial-overlap";
    case ViolationKind::kIllegalNesting: return "illegal-nesting";
  }
  return "unknown";
}

std::set<UseCase> ValidationReport::Offending() const {
  std::set<UseCase> out;
  for (const auto &v : violations) out.insert(v.use_case);
  return out;
}

ValidationReport ValidateProgram(const TokenSequence &seq,
                                 const EditProgram &program) {
  ValidationReport report;
  const int n = seq.size();
  const auto sep = seq.sep_index();
  auto add = [&](ViolationKind k, UseCase u, std::optional<UseCase> other,
                 std::string detail) {
    report.violations.push_back({k, u, other, std::move(detail)});
  };

  // Use cases whose own substitution is well-formed; only these take part in
  // the cross-use-case checks.
  std::array<bool, kNumUseCases> well_formed{};

  for (const auto &e : program) {
    const UseCase u = e.use_case;
    if (e.substitution) {
      bool ok = true;
      for (const Span *s : {&e.substitution->replacement,
                            &e.substitution->replaced}) {
        if (s->start < 0 || s->start >= s->end || s->end > n) {
          add(ViolationKind::kSpanOutOfRange, u, std::nullopt, SpanText(*s));
          ok = false;
        } else if (sep && s->Contains(*sep)) {
          add(ViolationKind::kSpanCoversSeparator, u, std::nullopt,
              SpanText(*s));
          ok = false;
        }
      }
      if (ok && !e.substitution->replacement.Disjoint(e.substitution->replaced)) {
        add(ViolationKind::kSelfOverlap, u, std::nullopt,
            SpanText(e.substitution->replacement) + " vs " +
                SpanText(e.substitution->replaced));
        ok = false;
      }
      well_formed[Index(u)] = ok;
    }
    for (int d : e.deletions) {
      if (d < 0 || d >= n) {
        add(ViolationKind::kDeletionOutOfRange, u, std::nullopt,
            std::to_string(d));
      } else if (e.substitution && (e.substitution->replacement.Contains(d) ||
                                    e.substitution->replaced.Contains(d))) {
        add(ViolationKind::kDeletionInOwnSpan, u, std::nullopt,
            std::to_string(d));
      }
    }
  }

  for (std::size_t a = 0; a < kNumUseCases; ++a) {
    for (std::size_t b = 0; b < kNumUseCases; ++b) {
      if (a == b || !well_formed[b]) continue;
      const auto &da = program[kAllUseCases[a]].deletions;
      const auto &sb = *program[kAllUseCases[b]].substitution;
      for (int d : da) {
        if (sb.replacement.Contains(d) || sb.replaced.Contains(d)) {
          add(ViolationKind::kDeletionInOtherSpan, kAllUseCases[a],
              kAllUseCases[b], std::to_string(d));
        }
      }
    }
  }

  for (std::size_t a = 0; a < kNumUseCases; ++a) {
    if (!well_formed[a]) continue;
    for (std::size_t b = a + 1; b < kNumUseCases; ++b) {
      if (!well_formed[b]) continue;
      const UseCase ua = kAllUseCases[a];
      const UseCase ub = kAllUseCases[b];
      const auto &sa = *program[ua].substitution;
      const auto &sb = *program[ub].substitution;
      auto same_kind = [&](const Span &x, const Span &y, const char *what) {
        const auto rel = Classify(x, y);
        if (rel == SpanRelation::kDisjoint) return;
        add(rel == SpanRelation::kPartialOverlap
                ? ViolationKind::kPartialOverlap
                : ViolationKind::kIllegalNesting,
            ub, ua, std::string(what) + " " + SpanText(x) + " vs " + SpanText(y));
      };
      same_kind(sa.replacement, sb.replacement, "replacements");
      same_kind(sa.replaced, sb.replaced, "replaced spans");
      // Replacement vs replaced: any nesting direction composes.
      for (const auto &[x, y] : {std::pair{sa.replacement, sb.replaced},
                                 std::pair{sa.replaced, sb.replacement}}) {
        if (Classify(x, y) == SpanRelation::kPartialOverlap) {
          add(ViolationKind::kPartialOverlap, ub, ua,
              SpanText(x) + " vs " + SpanText(y));
        }
      }
    }
  }
  return report;
}

bool MustPrecede(const Substitution &before, const Substitution &after) {
  const auto dep = Classify(after.replacement, before.replaced);
  if (dep == SpanRelation::kFirstContainsSecond) return true;
  const auto vacate = Classify(after.replaced, before.replacement);
  return vacate == SpanRelation::kFirstContainsSecond ||
         vacate == SpanRelation::kEqual;
}

std::vector<UseCase> BuildDependencyOrder(const EditProgram &program) {
  std::vector<UseCase> subs;
  for (const auto &e : program) {
    if (e.substitution) subs.push_back(e.use_case);
  }
  const std::size_t n = subs.size();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<int> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && MustPrecede(*program[subs[i]].substitution,
                                *program[subs[j]].substitution)) {
        succ[i].push_back(j);
        ++indegree[j];
      }
    }
  }
  // Kahn's algorithm; subs is in canonical order so the first ready entry
  // wins ties.
  std::vector<UseCase> order;
  std::vector<bool> done(n, false);
  while (order.size() < n) {
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && indegree[i] == 0) {
        pick = i;
        break;
      }
    }
    if (pick == n) {
      std::string names;
      for (std::size_t i = 0; i < n; ++i) {
        if (!done[i]) {
          if (!names.empty()) names += ", ";
          names += UseCaseName(subs[i]);
        }
      }
      throw CyclicDependencyError("cyclic substitution dependency among " +
                                  names);
    }
    done[pick] = true;
    order.push_back(subs[pick]);
    for (std::size_t j : succ[pick]) --indegree[j];
  }
  return order;
}

namespace {

// A node on the working chain: a token cell or a boundary marker.
struct Node {
  int cell = -1;  // index into the cell vector, -1 for markers
  int marker = -1;
};

// Marker ids: 4 * use_case + {0: replacement open, 1: replacement close,
// 2: replaced open, 3: replaced close}.
constexpr int kRepOpen = 0;
constexpr int kRepClose = 1;
constexpr int kRpdOpen = 2;
constexpr int kRpdClose = 3;

struct MarkedSpan {
  Span span;
  int rank;      // position in application order
  int open_id;   // marker id of the opening marker
};

class Chain {
 public:
  Chain(const TokenSequence &seq, const EditProgram &program,
        const std::vector<UseCase> &order)
      : cells_(seq.cells()) {
    std::vector<MarkedSpan> spans;
    for (std::size_t r = 0; r < order.size(); ++r) {
      const auto &s = *program[order[r]].substitution;
      const int base = 4 * static_cast<int>(Index(order[r]));
      spans.push_back({s.replacement, static_cast<int>(r), base + kRepOpen});
      spans.push_back({s.replaced, static_cast<int>(r), base + kRpdOpen});
    }
    // Valid programs form a laminar family. Outer spans first; on equal
    // extent the later-applied substitution is outer so that the earlier one
    // can vacate the region without dragging the later one's markers along.
    std::sort(spans.begin(), spans.end(),
              [](const MarkedSpan &a, const MarkedSpan &b) {
                if (a.span.start != b.span.start) return a.span.start < b.span.start;
                if (a.span.end != b.span.end) return a.span.end > b.span.end;
                return a.rank > b.rank;
              });
    std::vector<const MarkedSpan *> open;
    std::size_t next = 0;
    const int n = static_cast<int>(cells_.size());
    for (int pos = 0; pos <= n; ++pos) {
      while (!open.empty() && open.back()->span.end == pos) {
        Push(open.back()->open_id + 1);
        open.pop_back();
      }
      while (next < spans.size() && spans[next].span.start == pos) {
        Push(spans[next].open_id);
        open.push_back(&spans[next]);
        ++next;
      }
      if (pos < n) nodes_.push_back({pos, -1});
    }
  }

  void SetDeletions(const std::set<int> &ids) {
    for (int id : ids) cells_[id].deleted = true;
  }

  void Apply(UseCase u) {
    const int base = 4 * static_cast<int>(Index(u));
    auto rep_open = markers_.at(base + kRepOpen);
    auto rep_close = markers_.at(base + kRepClose);
    auto rpd_open = markers_.at(base + kRpdOpen);
    auto rpd_close = markers_.at(base + kRpdClose);
    nodes_.erase(std::next(rpd_open), rpd_close);
    nodes_.splice(rpd_close, nodes_, std::next(rep_open), rep_close);
    for (auto it : {rep_open, rep_close, rpd_open, rpd_close}) nodes_.erase(it);
    for (int k = 0; k < 4; ++k) markers_.erase(base + k);
  }

  std::string Linearize() const {
    std::string out;
    for (const auto &node : nodes_) {
      if (node.cell < 0) continue;
      if (!out.empty()) out += ' ';
      out += cells_[node.cell].text;
    }
    return out;
  }

  std::vector<TokenCell> Cells() const {
    std::vector<TokenCell> out;
    for (const auto &node : nodes_) {
      if (node.cell >= 0) out.push_back(cells_[node.cell]);
    }
    return out;
  }

 private:
  void Push(int marker) {
    nodes_.push_back({-1, marker});
    markers_.emplace(marker, std::prev(nodes_.end()));
  }

  std::vector<TokenCell> cells_;
  std::list<Node> nodes_;
  std::map<int, std::list<Node>::iterator> markers_;
};

}  // namespace

RewriteResult ApplyProgram(const TokenSequence &seq, const EditProgram &program,
                           const ApplyOptions &options) {
  RewriteResult result;
  result.effective = program;
  // Drop single-use-case violations first, since those use cases may also be
  // the counterpart of cross-use-case violations.
  for (;;) {
    const auto report = ValidateProgram(seq, result.effective);
    if (report.ok()) break;
    std::set<UseCase> drop;
    for (const auto &v : report.violations) {
      if (!v.other) drop.insert(v.use_case);
    }
    if (drop.empty()) drop = report.Offending();
    for (const auto &v : report.violations) {
      if (drop.count(v.use_case)) result.dropped.push_back(v);
    }
    for (UseCase u : drop) {
      result.effective[u].substitution.reset();
      result.effective[u].deletions.clear();
    }
  }

  std::vector<UseCase> order;
  if (options.order) {
    order = *options.order;
    std::set<UseCase> given(order.begin(), order.end());
    std::set<UseCase> expected;
    for (const auto &e : result.effective) {
      if (e.substitution) expected.insert(e.use_case);
    }
    if (given != expected || given.size() != order.size()) {
      throw InvalidInputError("explicit order does not match substitutions");
    }
  } else {
    order = BuildDependencyOrder(result.effective);
  }

  Chain chain(seq, result.effective, order);
  const auto deletions = result.effective.AllDeletions();
  const int flag_at = std::clamp(options.deletion_after_step, 0,
                                 static_cast<int>(order.size()));
  for (std::size_t step = 0; step <= order.size(); ++step) {
    if (static_cast<int>(step) == flag_at) chain.SetDeletions(deletions);
    if (step == order.size()) break;
    chain.Apply(order[step]);
    result.trace.push_back(chain.Linearize());
  }
  result.applied_order = order;
  const auto cells = chain.Cells();
  result.tokens = ExtractRewrite(cells);
  return result;
}

std::vector<TokenCell> ApplyToChain(const TokenSequence &seq,
                                    const EditProgram &program) {
  const auto order = BuildDependencyOrder(program);
  Chain chain(seq, program, order);
  chain.SetDeletions(program.AllDeletions());
  for (UseCase u : order) chain.Apply(u);
  return chain.Cells();
}

std::vector<std::string> ExtractRewrite(std::span<const TokenCell> chain) {
  std::size_t begin = 0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (!chain[i].deleted && chain[i].segment == Segment::kSep) begin = i + 1;
  }
  std::vector<std::string> out;
  for (std::size_t i = begin; i < chain.size(); ++i) {
    if (!chain[i].deleted) out.push_back(chain[i].text);
  }
  if (out.empty()) throw EmptyRewriteError("rewrite is empty");
  return out;
}

}  // namespace qrw
