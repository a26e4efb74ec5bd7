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


#ifndef QRW_MODEL_CONFIG_HPP_
#define QRW_MODEL_CONFIG_HPP_

#include <cstdint>
#include <string>

#include "json.hpp"
#include "qrw/use_case.hpp"

namespace qrw {

enum class EmbeddingMode { kTrainable, kFrozenExternal };

struct ModelConfig {
  int num_use_cases = static_cast<int>(kNumUseCases);
  int embed_dim = 192;
  int hidden_dim = 128;  // per LSTM direction
  int proj_dim = 128;    // biaffine query/key projection
  double dropout = 0.2;
  double learning_rate = 6e-4;
  int batch_size = 64;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int max_len = 64;
  std::uint64_t seed = 1;
  int max_epochs = 30;
  int patience = 5;
  EmbeddingMode embedding_mode = EmbeddingMode::kTrainable;
  // Text file of "<token> v1 ... v_embed_dim" lines; FROZEN_EXTERNAL only.
  std::string embedding_path;

  int encoder_dim() const { return 2 * hidden_dim; }

  // Throws InvalidInputError.
  void Validate() const;

  // "key = value" lines in a fixed key order.
  std::string ToText() const;
  // Unknown keys are an error.
  static ModelConfig FromText(const std::string &text);
  nlohmann::json ToJson() const;
  // Applies the keys of `j`; unknown keys are an error.
  void Update(const nlohmann::json &j);

  friend bool operator==(const ModelConfig &, const ModelConfig &) = default;
};

}  // namespace qrw

#endif  // QRW_MODEL_CONFIG_HPP_
