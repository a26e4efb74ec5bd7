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


#ifndef QRW_MODEL_LOSS_HPP_
#define QRW_MODEL_LOSS_HPP_

#include "qrw/model/labels.hpp"
#include "qrw/model/network.hpp"

namespace qrw {

struct LossBreakdown {
  double rd = 0;
  double rr = 0;
  double del = 0;
  double total = 0;  // rd + rr + del

  LossBreakdown &operator+=(const LossBreakdown &o);
  LossBreakdown Scaled(double s) const;
};

// Per-example loss:
//   rd  = (1/U) sum_u sum_i CE(rd[u][:, i], y_rd[u][i])
//   del = (1/U) sum_u sum_i CE(del[u][:, i], y_del[u][i])
//   rr  = sum_u [u has a replacement] (CE at the start row + CE at the end row)
// Throws InvalidInputError on labels that do not fit the output.
template <typename S>
LossBreakdown ComputeLoss(const ForwardOutput<S> &out, const LabelTensors &labels);

}  // namespace qrw

#endif  // QRW_MODEL_LOSS_HPP_
