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


#ifndef QRW_MODEL_VOCABULARY_HPP_
#define QRW_MODEL_VOCABULARY_HPP_

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qrw/datagen.hpp"

namespace qrw {

// Token <-> id map with PAD = 0, UNK = 1, SEP = 2.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kSep = 2;

  Vocabulary();

  // Specials plus every context/follow-up token, sorted for stability.
  static Vocabulary Build(std::span<const LabeledExample> examples);
  static Vocabulary FromTokens(std::vector<std::string> tokens);

  int Id(const std::string &token) const;
  std::vector<int> Ids(const TokenSequence &seq) const;
  const std::string &Token(int id) const { return tokens_.at(id); }
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string> &tokens() const { return tokens_; }

  friend bool operator==(const Vocabulary &a, const Vocabulary &b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace qrw

#endif  // QRW_MODEL_VOCABULARY_HPP_
