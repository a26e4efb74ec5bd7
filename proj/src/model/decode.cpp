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


#include "qrw/model/decode.hpp"

#include "qrw/errors.hpp"

namespace qrw {

namespace {

struct Run {
  Span span;
  double mean = 0;
};

template <typename S>
std::optional<Span> BestRun(const Mat<S> &rd) {
  const int T = static_cast<int>(rd.cols());
  std::optional<Run> best;
  std::optional<Run> cur;
  double sum = 0;
  auto close = [&](int end) {
    if (!cur) return;
    cur->span.end = end;
    cur->mean = sum / cur->span.length();
    if (!best || cur->mean > best->mean) best = cur;
    cur.reset();
  };
  for (int t = 0; t < T; ++t) {
    Eigen::Index tag;
    const double p = static_cast<double>(rd.col(t).maxCoeff(&tag));
    if (tag == kTagB) {
      close(t);
      cur = Run{{t, t}, 0};
      sum = p;
    } else if (tag == kTagI && cur) {
      sum += p;
    } else {
      close(t);
    }
  }
  close(T);
  if (!best) return std::nullopt;
  return best->span;
}

}  // namespace

template <typename S>
EditProgram Decode(const ForwardOutput<S> &out, const TokenSequence &seq) {
  if (out.T != seq.size()) throw InvalidInputError("output length does not match input");
  EditProgram program;
  for (UseCase u : kAllUseCases) {
    const std::size_t ui = Index(u);
    auto &edits = program[u];
    for (int t = 0; t < out.T; ++t) {
      if (static_cast<double>(out.del[ui](kDelete, t)) > 0.5) edits.deletions.insert(t);
    }
    const auto run = BestRun(out.rd[ui]);
    if (!run || out.rr[ui].rows() != out.T) continue;
    Eigen::Index start, end;
    out.rr[ui].row(run->start).maxCoeff(&start);
    out.rr[ui].row(run->end - 1).maxCoeff(&end);
    if (start > end) continue;
    edits.substitution = Substitution{*run, {static_cast<int>(start), static_cast<int>(end) + 1}};
  }

  // Validate substitutions on their own, then strip deletions that fall in
  // a surviving span.
  EditProgram subs;
  for (UseCase u : kAllUseCases) subs[u].substitution = program[u].substitution;
  for (;;) {
    const auto report = ValidateProgram(seq, subs);
    if (report.ok()) break;
    for (UseCase u : report.Offending()) {
      subs[u].substitution.reset();
      program[u].substitution.reset();
    }
  }
  for (UseCase u : kAllUseCases) {
    auto &dels = program[u].deletions;
    for (UseCase v : kAllUseCases) {
      const auto &s = program[v].substitution;
      if (!s) continue;
      for (auto it = dels.begin(); it != dels.end();) {
        it = (s->replacement.Contains(*it) || s->replaced.Contains(*it)) ? dels.erase(it)
                                                                         : std::next(it);
      }
    }
  }
  return program;
}

ForwardOutput<double> OneHotOutput(const LabelTensors &labels) {
  const int T = labels.T;
  ForwardOutput<double> out;
  out.T = T;
  for (std::size_t u = 0; u < kNumUseCases; ++u) {
    const auto &l = labels.use_cases[u];
    out.rd[u] = Mat<double>::Zero(3, T);
    out.del[u] = Mat<double>::Zero(2, T);
    out.rr[u] = Mat<double>::Constant(T, T, 1.0 / T);
    for (int t = 0; t < T; ++t) {
      out.rd[u](l.rd[t], t) = 1.0;
      out.del[u](l.del[t], t) = 1.0;
    }
    if (l.has_replacement) {
      for (int k = 0; k < 2; ++k) {
        out.rr[u].row(l.rr_query[k]).setZero();
        out.rr[u](l.rr_query[k], l.rr_target[k]) = 1.0;
      }
    }
  }
  return out;
}

template EditProgram Decode<float>(const ForwardOutput<float> &, const TokenSequence &);
template EditProgram Decode<double>(const ForwardOutput<double> &, const TokenSequence &);

}  // namespace qrw
