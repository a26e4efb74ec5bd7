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


#ifndef QRW_MODEL_NETWORK_HPP_
#define QRW_MODEL_NETWORK_HPP_

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qrw/model/config.hpp"
#include "qrw/model/labels.hpp"
#include "qrw/model/parameters.hpp"

namespace qrw {

template <typename S>
struct ForwardOutput {
  int T = 0;
  Mat<S> H;  // encoder_dim x T; column t is the state of token t
  std::array<Mat<S>, kNumUseCases> rd;   // 3 x T, each column a distribution
  std::array<Mat<S>, kNumUseCases> rr;   // T x T, each row a distribution
  std::array<Mat<S>, kNumUseCases> del;  // 2 x T, each column a distribution
};

// Activations kept for the backward pass.
template <typename S>
struct ForwardCache {
  std::vector<int> ids;
  Mat<S> X;  // embed_dim x T
  struct Direction {
    Mat<S> gates;  // 4h x T after the nonlinearities (i, f, g, o)
    Mat<S> c;      // h x T
    Mat<S> h;      // h x T
  };
  std::array<Direction, 2> dir;
  Mat<S> mask;  // dropout mask on H, scaled; empty when dropout is off
  Mat<S> Hd;    // H after dropout
  std::array<Mat<S>, kNumUseCases> q;
  std::array<Mat<S>, kNumUseCases> k;
};

// Number of Encode calls since the last reset, across all threads.
std::uint64_t EncoderInvocations();
void ResetEncoderInvocations();

// BiLSTM over the embedded ids. Dropout on the output states is applied when
// dropout_rng is non-null. Throws LengthError unless 1 <= T <= max_len.
template <typename S>
Mat<S> Encode(const ParamSet<S> &params, const ModelConfig &config,
              std::span<const int> ids, std::mt19937_64 *dropout_rng,
              ForwardCache<S> *cache);

// Per-use-case heads over encoder states. need_rr selects the use cases whose
// pointer matrix is computed; the others are left empty.
template <typename S>
void HeadsForward(const ParamSet<S> &params, const ModelConfig &config,
                  const Mat<S> &H, ForwardOutput<S> &out, ForwardCache<S> *cache,
                  const std::array<bool, kNumUseCases> &need_rr);

// Encode followed by HeadsForward. `labels`, when given, limits the pointer
// matrices to use cases that carry a replacement.
template <typename S>
ForwardOutput<S> Forward(const ParamSet<S> &params, const ModelConfig &config,
                         std::span<const int> ids, std::mt19937_64 *dropout_rng,
                         ForwardCache<S> *cache, const LabelTensors *labels = nullptr);

// Adds scale * dL/dtheta to grad for the per-example loss L of ComputeLoss.
// Frozen tensors receive no gradient.
template <typename S>
void Backward(const ParamSet<S> &params, const ModelConfig &config,
              const ForwardCache<S> &cache, const ForwardOutput<S> &out,
              const LabelTensors &labels, S scale, ParamSet<S> &grad);

}  // namespace qrw

#endif  // QRW_MODEL_NETWORK_HPP_
