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


#ifndef QRW_MODEL_CHECKPOINT_HPP_
#define QRW_MODEL_CHECKPOINT_HPP_

#include <filesystem>
#include <string>

#include "qrw/model/model.hpp"

namespace qrw {

// Binary layout, integers little-endian u32:
//   "QRWCKPT\0"  version
//   config text length, config text ("key = value" lines)
//   vocabulary size, then (length, bytes) per token
//   tensor count, then per tensor: name length, name, rows, cols,
//   rows*cols float32 values in column-major order
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string SerializeCheckpoint(const Model &model);
// Throws CheckpointError on bad magic, version, shapes, or truncation.
Model DeserializeCheckpoint(const std::string &bytes);

void SaveCheckpoint(const Model &model, const std::filesystem::path &path);
Model LoadCheckpoint(const std::filesystem::path &path);

}  // namespace qrw

#endif  // QRW_MODEL_CHECKPOINT_HPP_
