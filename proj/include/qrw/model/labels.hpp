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


#ifndef QRW_MODEL_LABELS_HPP_
#define QRW_MODEL_LABELS_HPP_

#include <array>
#include <vector>

#include "qrw/edit_engine.hpp"

namespace qrw {

enum BioTag : int { kTagO = 0, kTagB = 1, kTagI = 2 };
enum DelTag : int { kKeep = 0, kDelete = 1 };

// Per-use-case supervision for one sequence of length T.
struct UseCaseLabels {
  std::vector<int> rd;   // BioTag per position
  std::vector<int> del;  // DelTag per position
  bool has_replacement = false;
  // Query rows (replacement start, replacement end - 1) and their targets
  // (replaced start, replaced end - 1).
  std::array<int, 2> rr_query{};
  std::array<int, 2> rr_target{};

  friend bool operator==(const UseCaseLabels &, const UseCaseLabels &) = default;
};

struct LabelTensors {
  int T = 0;
  std::array<UseCaseLabels, kNumUseCases> use_cases;

  // Throws InvalidInputError on indices outside [0, T).
  void Check() const;
  friend bool operator==(const LabelTensors &, const LabelTensors &) = default;
};

LabelTensors MakeLabels(const TokenSequence &seq, const EditProgram &program);

}  // namespace qrw

#endif  // QRW_MODEL_LABELS_HPP_
