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


#ifndef QRW_MODEL_MODEL_HPP_
#define QRW_MODEL_MODEL_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrw/edit_engine.hpp"
#include "qrw/model/config.hpp"
#include "qrw/model/network.hpp"
#include "qrw/model/parameters.hpp"
#include "qrw/model/vocabulary.hpp"

namespace qrw {

// Config, vocabulary and weights: everything inference needs.
struct Model {
  ModelConfig config;
  Vocabulary vocab;
  ParamSet<float> params;

  // Fresh weights (or the external table in FROZEN_EXTERNAL mode).
  static Model Create(const ModelConfig &config, Vocabulary vocab);

  // One encoder pass, one heads pass.
  ForwardOutput<float> Run(const TokenSequence &seq) const;
  EditProgram Predict(const TokenSequence &seq) const;
};

struct Prediction {
  EditProgram program;
  // Empty when applying the program fails (empty rewrite or a cycle).
  std::optional<RewriteResult> result;
};

Prediction PredictRewrite(const Model &model, const TokenSequence &seq);

// Batched PredictRewrite; `parallel` selects the OpenMP kernel.
std::vector<Prediction> PredictRewrites(const Model &model,
                                        std::span<const TokenSequence> inputs,
                                        bool parallel = true);

}  // namespace qrw

#endif  // QRW_MODEL_MODEL_HPP_
