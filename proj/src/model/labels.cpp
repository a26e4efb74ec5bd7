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


#include "qrw/model/labels.hpp"

#include "qrw/errors.hpp"

namespace qrw {

void LabelTensors::Check() const {
  auto in_range = [&](int i) { return 0 <= i && i < T; };
  for (const auto &l : use_cases) {
    if (static_cast<int>(l.rd.size()) != T || static_cast<int>(l.del.size()) != T) {
      throw InvalidInputError("label length does not match T");
    }
    for (int t = 0; t < T; ++t) {
      if (l.rd[t] < 0 || l.rd[t] > 2 || l.del[t] < 0 || l.del[t] > 1) {
        throw InvalidInputError("label class out of range");
      }
    }
    if (l.has_replacement) {
      for (int k = 0; k < 2; ++k) {
        if (!in_range(l.rr_query[k]) || !in_range(l.rr_target[k])) {
          throw InvalidInputError("pointer label out of range");
        }
      }
    }
  }
}

LabelTensors MakeLabels(const TokenSequence &seq, const EditProgram &program) {
  LabelTensors out;
  out.T = seq.size();
  for (const auto &e : program) {
    auto &l = out.use_cases[Index(e.use_case)];
    l.rd.assign(out.T, kTagO);
    l.del.assign(out.T, kKeep);
    for (int d : e.deletions) {
      if (d < 0 || d >= out.T) throw InvalidInputError("deletion index out of range");
      l.del[d] = kDelete;
    }
    if (e.substitution) {
      const auto &rep = e.substitution->replacement;
      const auto &rpd = e.substitution->replaced;
      if (rep.start < 0 || rep.end > out.T || rep.length() <= 0 ||
          rpd.start < 0 || rpd.end > out.T || rpd.length() <= 0) {
        throw InvalidInputError("substitution span out of range");
      }
      l.rd[rep.start] = kTagB;
      for (int t = rep.start + 1; t < rep.end; ++t) l.rd[t] = kTagI;
      l.has_replacement = true;
      l.rr_query = {rep.start, rep.end - 1};
      l.rr_target = {rpd.start, rpd.end - 1};
    }
  }
  return out;
}

}  // namespace qrw
