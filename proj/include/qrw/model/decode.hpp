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


#ifndef QRW_MODEL_DECODE_HPP_
#define QRW_MODEL_DECODE_HPP_

#include "qrw/edit_engine.hpp"
#include "qrw/model/labels.hpp"
#include "qrw/model/network.hpp"

namespace qrw {

// Turns head outputs into an edit program, per use case:
//   - BIO argmax per token; an I that does not continue a run becomes O.
//   - Among several B-initiated runs, keep the one with the highest mean
//     probability of its argmax tags (earliest on ties).
//   - The replaced span runs from the pointer argmax at the run's first row
//     to the pointer argmax at its last row; start > end drops it.
//   - A token is deleted iff p(delete) > 0.5.
// Substitutions that fail validation are dropped (later use case first on
// cross-use-case conflicts), then deletions inside any surviving span are
// dropped.
template <typename S>
EditProgram Decode(const ForwardOutput<S> &out, const TokenSequence &seq);

// Probability-one outputs that put all mass on the labels. Unsupervised
// pointer rows are uniform.
ForwardOutput<double> OneHotOutput(const LabelTensors &labels);

}  // namespace qrw

#endif  // QRW_MODEL_DECODE_HPP_
