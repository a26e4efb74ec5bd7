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


#include "qrw/model/kernels.hpp"

#include <exception>
#include <random>

#include "qrw/model/decode.hpp"

namespace qrw {

TrainingExample PrepareExample(const LabeledExample &ex, const Vocabulary &vocab) {
  const auto seq = ex.Sequence();
  return {vocab.Ids(seq), MakeLabels(seq, ex.program)};
}

std::vector<TrainingExample> PrepareExamples(std::span<const LabeledExample> examples,
                                             const Vocabulary &vocab) {
  std::vector<TrainingExample> out;
  out.reserve(examples.size());
  for (const auto &ex : examples) out.push_back(PrepareExample(ex, vocab));
  return out;
}

namespace {

// Accumulates examples [begin, end) of the batch into grad with the given
// scale and returns the summed (unscaled) loss.
template <typename S>
LossBreakdown Accumulate(const ParamSet<S> &params, const ModelConfig &config,
                         std::span<const TrainingExample *const> batch,
                         std::size_t begin, std::size_t end,
                         std::uint64_t dropout_seed, bool train, S scale,
                         ParamSet<S> &grad) {
  LossBreakdown sum;
  ForwardCache<S> cache;
  for (std::size_t b = begin; b < end; ++b) {
    const auto &ex = *batch[b];
    std::mt19937_64 rng(ExampleSeed(dropout_seed, 0, b));
    const auto out = Forward<S>(params, config, ex.ids, train ? &rng : nullptr, &cache,
                             &ex.labels);
    sum += ComputeLoss(out, ex.labels);
    Backward(params, config, cache, out, ex.labels, scale, grad);
  }
  return sum;
}

}  // namespace

template <typename S>
LossBreakdown BatchGradientSerial(const ParamSet<S> &params, const ModelConfig &config,
                                  std::span<const TrainingExample *const> batch,
                                  std::uint64_t dropout_seed, bool train,
                                  ParamSet<S> &grad) {
  grad.flat().setZero();
  if (batch.empty()) return {};
  const S scale = S(1) / static_cast<S>(batch.size());
  const auto sum = Accumulate(params, config, batch, 0, batch.size(), dropout_seed,
                              train, scale, grad);
  return sum.Scaled(1.0 / static_cast<double>(batch.size()));
}

template <typename S>
LossBreakdown BatchGradientParallel(const ParamSet<S> &params, const ModelConfig &config,
                                    std::span<const TrainingExample *const> batch,
                                    std::uint64_t dropout_seed, bool train,
                                    ParamSet<S> &grad,
                                    std::vector<ParamSet<S>> &scratch) {
  grad.flat().setZero();
  if (batch.empty()) return {};
  const std::size_t n = batch.size();
  const S scale = S(1) / static_cast<S>(n);
  if (scratch.size() != kGradientChunks ||
      scratch[0].flat().size() != params.flat().size()) {
    scratch.assign(kGradientChunks, ParamSet<S>(params.layout_ptr()));
  }
  std::array<LossBreakdown, kGradientChunks> losses;
  std::array<std::exception_ptr, kGradientChunks> errors;

#pragma omp parallel for schedule(static, 1)
  for (int c = 0; c < kGradientChunks; ++c) {
    const std::size_t begin = n * c / kGradientChunks;
    const std::size_t end = n * (c + 1) / kGradientChunks;
    scratch[c].flat().setZero();
    try {
      losses[c] = Accumulate(params, config, batch, begin, end, dropout_seed, train,
                             scale, scratch[c]);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (const auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  LossBreakdown sum;
  for (int c = 0; c < kGradientChunks; ++c) {
    grad.flat() += scratch[c].flat();
    sum += losses[c];
  }
  return sum.Scaled(1.0 / static_cast<double>(n));
}

std::vector<EditProgram> PredictSerial(const ParamSet<float> &params,
                                       const ModelConfig &config,
                                       const Vocabulary &vocab,
                                       std::span<const TokenSequence> inputs) {
  std::vector<EditProgram> out;
  out.reserve(inputs.size());
  for (const auto &seq : inputs) {
    const auto ids = vocab.Ids(seq);
    out.push_back(Decode(Forward<float>(params, config, ids, nullptr, nullptr), seq));
  }
  return out;
}

std::vector<EditProgram> PredictParallel(const ParamSet<float> &params,
                                         const ModelConfig &config,
                                         const Vocabulary &vocab,
                                         std::span<const TokenSequence> inputs) {
  std::vector<EditProgram> out(inputs.size());
  std::vector<std::exception_ptr> errors(inputs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    try {
      const auto ids = vocab.Ids(inputs[i]);
      out[i] = Decode(Forward<float>(params, config, ids, nullptr, nullptr), inputs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

template LossBreakdown BatchGradientSerial<float>(
    const ParamSet<float> &, const ModelConfig &,
    std::span<const TrainingExample *const>, std::uint64_t, bool, ParamSet<float> &);
template LossBreakdown BatchGradientSerial<double>(
    const ParamSet<double> &, const ModelConfig &,
    std::span<const TrainingExample *const>, std::uint64_t, bool, ParamSet<double> &);
template LossBreakdown BatchGradientParallel<float>(
    const ParamSet<float> &, const ModelConfig &,
    std::span<const TrainingExample *const>, std::uint64_t, bool, ParamSet<float> &,
    std::vector<ParamSet<float>> &);
template LossBreakdown BatchGradientParallel<double>(
    const ParamSet<double> &, const ModelConfig &,
    std::span<const TrainingExample *const>, std::uint64_t, bool, ParamSet<double> &,
    std::vector<ParamSet<double>> &);

}  // namespace qrw
