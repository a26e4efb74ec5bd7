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


#ifndef QRW_CLI_RUN_CONFIG_HPP_
#define QRW_CLI_RUN_CONFIG_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "qrw/model/config.hpp"

namespace qrw {

// Settings of every subcommand. Files hold "key = value" lines; '#' starts a
// comment. Model keys (embed_dim, learning_rate, seed, ...) share the flat
// namespace.
struct RunConfig {
  std::string data_root = QRW_DATA_DIR;  // catalogs, lexicons, templates
  std::string data_dir = "qrw_data";     // datagen output, read by later steps
  std::size_t examples_per_use_case = 10000;
  std::size_t compositional_examples = 2500;
  std::size_t compositional_train_size = 0;  // added to single-task training
  std::string checkpoint;
  std::string eval_sets = "single";  // single, compositional or all
  std::string eval_split = "TEST";
  bool oracle = false;
  std::string sweep_sizes = "0,100,500,2000";
  int bench_warmup = 5;
  int bench_reps = 100;
  int bench_per_length = 20;
  bool resume = false;
  ModelConfig model;

  // Throws InvalidInputError on unknown keys or bad values.
  void Set(const std::string &key, const std::string &value);
  void Apply(const std::string &text);
  static RunConfig Load(const std::filesystem::path &path);
  // Every key, run keys first, then model keys.
  std::string ToText() const;

  std::vector<std::size_t> SweepSizes() const;
};

}  // namespace qrw

#endif  // QRW_CLI_RUN_CONFIG_HPP_
