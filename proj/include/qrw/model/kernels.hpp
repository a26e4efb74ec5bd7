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


#ifndef QRW_MODEL_KERNELS_HPP_
#define QRW_MODEL_KERNELS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "qrw/datagen.hpp"
#include "qrw/model/labels.hpp"
#include "qrw/model/loss.hpp"
#include "qrw/model/network.hpp"
#include "qrw/model/vocabulary.hpp"

namespace qrw {

// Model-ready example: token ids plus supervision.
struct TrainingExample {
  std::vector<int> ids;
  LabelTensors labels;
};

TrainingExample PrepareExample(const LabeledExample &ex, const Vocabulary &vocab);
std::vector<TrainingExample> PrepareExamples(std::span<const LabeledExample> examples,
                                             const Vocabulary &vocab);

// Fixed chunk count of the parallel batch gradient. Chunk boundaries, and so
// the floating-point reduction order, do not depend on the thread count.
inline constexpr int kGradientChunks = 8;

// Mean loss over the batch; grad is overwritten with the gradient of the mean.
// Example b of the batch draws its dropout mask from
// ExampleSeed(dropout_seed, 0, b); dropout is off when train is false.
template <typename S>
LossBreakdown BatchGradientSerial(const ParamSet<S> &params, const ModelConfig &config,
                                  std::span<const TrainingExample *const> batch,
                                  std::uint64_t dropout_seed, bool train,
                                  ParamSet<S> &grad);

// Same contract, computed over kGradientChunks chunks in parallel and reduced
// in chunk order. `scratch` holds per-chunk buffers between calls.
template <typename S>
LossBreakdown BatchGradientParallel(const ParamSet<S> &params, const ModelConfig &config,
                                    std::span<const TrainingExample *const> batch,
                                    std::uint64_t dropout_seed, bool train,
                                    ParamSet<S> &grad,
                                    std::vector<ParamSet<S>> &scratch);

// Forward pass and decode for every sequence, in input order.
std::vector<EditProgram> PredictSerial(const ParamSet<float> &params,
                                       const ModelConfig &config,
                                       const Vocabulary &vocab,
                                       std::span<const TokenSequence> inputs);
std::vector<EditProgram> PredictParallel(const ParamSet<float> &params,
                                         const ModelConfig &config,
                                         const Vocabulary &vocab,
                                         std::span<const TokenSequence> inputs);

}  // namespace qrw

#endif  // QRW_MODEL_KERNELS_HPP_
