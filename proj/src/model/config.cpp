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


#include "qrw/model/config.hpp"

#include <sstream>

#include "qrw/errors.hpp"

namespace qrw {

namespace {

std::string ModeName(EmbeddingMode m) {
  return m == EmbeddingMode::kTrainable ? "trainable" : "frozen_external";
}

EmbeddingMode ParseMode(const std::string &s) {
  if (s == "trainable") return EmbeddingMode::kTrainable;
  if (s == "frozen_external") return EmbeddingMode::kFrozenExternal;
  throw InvalidInputError("embedding_mode must be trainable or frozen_external");
}

}  // namespace

void ModelConfig::Validate() const {
  auto need = [](bool ok, const char *what) {
    if (!ok) throw InvalidInputError(std::string("model config: ") + what);
  };
  need(num_use_cases == static_cast<int>(kNumUseCases), "num_use_cases must be 5");
  need(embed_dim > 0 && hidden_dim > 0 && proj_dim > 0, "dims must be positive");
  need(dropout >= 0 && dropout < 1, "dropout must be in [0, 1)");
  need(learning_rate > 0, "learning_rate must be positive");
  need(batch_size > 0, "batch_size must be positive");
  need(adam_beta1 >= 0 && adam_beta1 < 1 && adam_beta2 >= 0 && adam_beta2 < 1,
       "Adam betas must be in [0, 1)");
  need(adam_epsilon > 0, "adam_epsilon must be positive");
  need(max_len > 0, "max_len must be positive");
  need(max_epochs > 0, "max_epochs must be positive");
  need(patience > 0, "patience must be positive");
  need(embedding_mode == EmbeddingMode::kTrainable || !embedding_path.empty(),
       "frozen_external needs embedding_path");
}

nlohmann::json ModelConfig::ToJson() const {
  return {{"num_use_cases", num_use_cases},
          {"embed_dim", embed_dim},
          {"hidden_dim", hidden_dim},
          {"proj_dim", proj_dim},
          {"dropout", dropout},
          {"learning_rate", learning_rate},
          {"batch_size", batch_size},
          {"adam_beta1", adam_beta1},
          {"adam_beta2", adam_beta2},
          {"adam_epsilon", adam_epsilon},
          {"max_len", max_len},
          {"seed", seed},
          {"max_epochs", max_epochs},
          {"patience", patience},
          {"embedding_mode", ModeName(embedding_mode)},
          {"embedding_path", embedding_path}};
}

void ModelConfig::Update(const nlohmann::json &j) {
  for (const auto &[key, v] : j.items()) {
    try {
      if (key == "num_use_cases") num_use_cases = v.get<int>();
      else if (key == "embed_dim") embed_dim = v.get<int>();
      else if (key == "hidden_dim") hidden_dim = v.get<int>();
      else if (key == "proj_dim") proj_dim = v.get<int>();
      else if (key == "dropout") dropout = v.get<double>();
      else if (key == "learning_rate") learning_rate = v.get<double>();
      else if (key == "batch_size") batch_size = v.get<int>();
      else if (key == "adam_beta1") adam_beta1 = v.get<double>();
      else if (key == "adam_beta2") adam_beta2 = v.get<double>();
      else if (key == "adam_epsilon") adam_epsilon = v.get<double>();
      else if (key == "max_len") max_len = v.get<int>();
      else if (key == "seed") seed = v.get<std::uint64_t>();
      else if (key == "max_epochs") max_epochs = v.get<int>();
      else if (key == "patience") patience = v.get<int>();
      else if (key == "embedding_mode") embedding_mode = ParseMode(v.get<std::string>());
      else if (key == "embedding_path") embedding_path = v.get<std::string>();
      else throw InvalidInputError("unknown model config key '" + key + "'");
    } catch (const nlohmann::json::exception &e) {
      throw InvalidInputError("model config key '" + key + "': " + e.what());
    }
  }
}

std::string ModelConfig::ToText() const {
  std::ostringstream out;
  const auto j = ToJson();
  for (const auto &[key, v] : j.items()) {
    out << key << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
  return out.str();
}

ModelConfig ModelConfig::FromText(const std::string &text) {
  ModelConfig c;
  nlohmann::json j = nlohmann::json::object();
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (line.empty()) continue;
    if (eq == std::string::npos) throw InvalidInputError("bad config line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 3);
    if (key == "embedding_mode" || key == "embedding_path") {
      j[key] = value;
    } else {
      try {
        j[key] = nlohmann::json::parse(value);
      } catch (const nlohmann::json::exception &) {
        throw InvalidInputError("bad value for '" + key + "'");
      }
    }
  }
  c.Update(j);
  return c;
}

}  // namespace qrw
