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


#include "qrw/program_search.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

#include "qrw/errors.hpp"

namespace qrw {

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 2;

// Minimum-deletion alignment of the chain against the target. Cells inside
// substitution spans may not be deleted. Returns the deleted cell ids, or
// nullopt if no alignment exists.
std::optional<std::set<int>> AlignDeletions(
    const std::vector<TokenCell> &chain, const std::vector<bool> &protect,
    std::span<const std::string> target) {
  const int n = static_cast<int>(chain.size());
  const int m = static_cast<int>(target.size());
  int sep_pos = -1;
  for (int i = 0; i < n; ++i) {
    if (chain[i].segment == Segment::kSep) sep_pos = i;
  }

  // best[i][j]: min deletions aligning chain[from..i) with target[0..j).
  auto align = [&](int from, bool drop_sep, std::set<int> &deleted) -> int {
    const int len = n - from;
    std::vector<std::vector<int>> best(len + 1, std::vector<int>(m + 1, kInf));
    best[0][0] = 0;
    for (int i = 0; i < len; ++i) {
      const auto &cell = chain[from + i];
      const bool is_sep = cell.segment == Segment::kSep;
      const bool can_delete = !protect[cell.id];
      for (int j = 0; j <= m; ++j) {
        if (best[i][j] >= kInf) continue;
        if (can_delete) best[i + 1][j] = std::min(best[i + 1][j], best[i][j] + 1);
        if (!(is_sep && drop_sep) && !is_sep && j < m && cell.text == target[j]) {
          best[i + 1][j + 1] = std::min(best[i + 1][j + 1], best[i][j]);
        }
      }
    }
    if (best[len][m] >= kInf) return kInf;
    for (int i = len, j = m; i > 0; --i) {
      const auto &cell = chain[from + i - 1];
      const bool keep_ok = cell.segment != Segment::kSep && j > 0 &&
                           cell.text == target[j - 1] &&
                           best[i - 1][j - 1] == best[i][j];
      if (keep_ok) {
        --j;
      } else {
        deleted.insert(cell.id);
      }
    }
    return best[len][m];
  };

  std::optional<std::set<int>> answer;
  int answer_cost = kInf;
  if (sep_pos >= 0) {
    // Separator survives; only the part after it matters.
    std::set<int> deleted;
    const int cost = align(sep_pos + 1, false, deleted);
    if (cost < answer_cost) {
      answer_cost = cost;
      answer = std::move(deleted);
    }
  }
  {
    std::set<int> deleted;
    const int cost = align(0, true, deleted);
    if (cost < answer_cost) {
      answer_cost = cost;
      answer = std::move(deleted);
    }
  }
  return answer;
}

bool CompatibleSubstitutions(const Substitution &a, const Substitution &b) {
  if (!a.replacement.Disjoint(b.replacement)) return false;
  if (!a.replaced.Disjoint(b.replaced)) return false;
  return Classify(a.replacement, b.replaced) != SpanRelation::kPartialOverlap &&
         Classify(a.replaced, b.replacement) != SpanRelation::kPartialOverlap;
}

class Searcher {
 public:
  Searcher(const TokenSequence &seq, std::span<const std::string> target,
           std::vector<UseCase> owners)
      : seq_(seq), target_(target), owners_(std::move(owners)) {
    const int n = seq.size();
    const auto sep = seq.sep_index();
    std::vector<Span> spans;
    for (int s = 0; s < n; ++s) {
      for (int e = s + 1; e <= n; ++e) {
        if (sep && Span{s, e}.Contains(*sep)) break;
        spans.push_back({s, e});
      }
    }
    for (const auto &rep : spans) {
      for (const auto &rpd : spans) {
        if (rep.Disjoint(rpd)) candidates_.push_back({rep, rpd});
      }
    }
  }

  std::optional<EditProgram> Run() {
    for (std::size_t k = 0; k <= owners_.size(); ++k) {
      chosen_.clear();
      if (Recurse(k, 0)) return found_;
    }
    return std::nullopt;
  }

 private:
  bool Recurse(std::size_t k, std::size_t first) {
    if (chosen_.size() == k) return Try();
    for (std::size_t c = first; c < candidates_.size(); ++c) {
      const auto &cand = candidates_[c];
      bool ok = true;
      for (std::size_t prev : chosen_) {
        if (!CompatibleSubstitutions(candidates_[prev], cand)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      chosen_.push_back(c);
      if (Recurse(k, c + 1)) return true;
      chosen_.pop_back();
    }
    return false;
  }

  bool Try() {
    EditProgram program;
    std::vector<bool> protect(seq_.size(), false);
    for (std::size_t i = 0; i < chosen_.size(); ++i) {
      const auto &sub = candidates_[chosen_[i]];
      program[owners_[i]].substitution = sub;
      for (const Span *s : {&sub.replacement, &sub.replaced}) {
        for (int t = s->start; t < s->end; ++t) protect[t] = true;
      }
    }
    std::vector<TokenCell> chain;
    try {
      chain = ApplyToChain(seq_, program);
    } catch (const CyclicDependencyError &) {
      return false;
    }
    auto deletions = AlignDeletions(chain, protect, target_);
    if (!deletions) return false;
    if (!deletions->empty()) {
      if (owners_.empty()) return false;
      program[owners_.front()].deletions = std::move(*deletions);
    }
    found_ = std::move(program);
    return true;
  }

  const TokenSequence &seq_;
  std::span<const std::string> target_;
  std::vector<UseCase> owners_;
  std::vector<Substitution> candidates_;
  std::vector<std::size_t> chosen_;
  EditProgram found_;
};

}  // namespace

std::optional<EditProgram> DeriveProgramBruteForce(
    const TokenSequence &seq, std::span<const std::string> target,
    const std::set<UseCase> &active_use_cases) {
  if (seq.size() > kMaxSearchLength) {
    throw BoundExceededError("sequence length " + std::to_string(seq.size()) +
                             " exceeds search bound " +
                             std::to_string(kMaxSearchLength));
  }
  if (target.empty()) return std::nullopt;

  // Rewrites only ever contain input cells, each at most once.
  std::map<std::string, int> budget;
  for (const auto &c : seq.cells()) {
    if (c.segment != Segment::kSep) ++budget[c.text];
  }
  for (const auto &t : target) {
    if (--budget[t] < 0) return std::nullopt;
  }

  std::vector<UseCase> owners(active_use_cases.begin(), active_use_cases.end());
  Searcher searcher(seq, target, std::move(owners));
  return searcher.Run();
}

}  // namespace qrw
