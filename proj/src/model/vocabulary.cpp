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


#include "qrw/model/vocabulary.hpp"

#include <set>

#include "qrw/errors.hpp"

namespace qrw {

Vocabulary::Vocabulary()
    : tokens_{"[PAD]", "[UNK]", std::string(kSepToken)},
      index_{{tokens_[0], kPad}, {tokens_[1], kUnk}, {tokens_[2], kSep}} {}

Vocabulary Vocabulary::FromTokens(std::vector<std::string> tokens) {
  if (tokens.size() < 3 || tokens[kSep] != kSepToken) {
    throw InvalidInputError("vocabulary must start with PAD, UNK, SEP");
  }
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  v.index_.clear();
  for (int i = 0; i < v.size(); ++i) {
    if (!v.index_.emplace(v.tokens_[i], i).second) {
      throw InvalidInputError("duplicate vocabulary entry '" + v.tokens_[i] + "'");
    }
  }
  return v;
}

Vocabulary Vocabulary::Build(std::span<const LabeledExample> examples) {
  std::set<std::string> seen;
  for (const auto &ex : examples) {
    seen.insert(ex.context.begin(), ex.context.end());
    seen.insert(ex.followup.begin(), ex.followup.end());
  }
  std::vector<std::string> tokens = {"[PAD]", "[UNK]", std::string(kSepToken)};
  for (const auto &t : seen) {
    if (t != tokens[0] && t != tokens[1] && t != tokens[2]) tokens.push_back(t);
  }
  return FromTokens(std::move(tokens));
}

int Vocabulary::Id(const std::string &token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::Ids(const TokenSequence &seq) const {
  std::vector<int> ids;
  ids.reserve(seq.size());
  for (const auto &c : seq.cells()) {
    ids.push_back(c.segment == Segment::kSep ? kSep : Id(c.text));
  }
  return ids;
}

}  // namespace qrw
