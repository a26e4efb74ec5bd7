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


#include "qrw/model/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qrw/errors.hpp"

namespace qrw {

namespace {

double CrossEntropy(double p) {
  return -std::log(std::max(p, std::numeric_limits<double>::min()));
}

}  // namespace

LossBreakdown &LossBreakdown::operator+=(const LossBreakdown &o) {
  rd += o.rd;
  rr += o.rr;
  del += o.del;
  total += o.total;
  return *this;
}

LossBreakdown LossBreakdown::Scaled(double s) const {
  return {rd * s, rr * s, del * s, total * s};
}

template <typename S>
LossBreakdown ComputeLoss(const ForwardOutput<S> &out, const LabelTensors &labels) {
  if (labels.T != out.T) throw InvalidInputError("labels and output disagree on T");
  labels.Check();
  LossBreakdown loss;
  for (std::size_t u = 0; u < kNumUseCases; ++u) {
    const auto &l = labels.use_cases[u];
    for (int t = 0; t < out.T; ++t) {
      loss.rd += CrossEntropy(static_cast<double>(out.rd[u](l.rd[t], t)));
      loss.del += CrossEntropy(static_cast<double>(out.del[u](l.del[t], t)));
    }
    if (l.has_replacement) {
      if (out.rr[u].rows() != out.T) throw InvalidInputError("missing pointer scores");
      for (int k = 0; k < 2; ++k) {
        loss.rr += CrossEntropy(
            static_cast<double>(out.rr[u](l.rr_query[k], l.rr_target[k])));
      }
    }
  }
  loss.rd /= static_cast<double>(kNumUseCases);
  loss.del /= static_cast<double>(kNumUseCases);
  loss.total = loss.rd + loss.rr + loss.del;
  return loss;
}

template LossBreakdown ComputeLoss<float>(const ForwardOutput<float> &,
                                          const LabelTensors &);
template LossBreakdown ComputeLoss<double>(const ForwardOutput<double> &,
                                           const LabelTensors &);

}  // namespace qrw
