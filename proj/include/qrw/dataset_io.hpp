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


#ifndef QRW_DATASET_IO_HPP_
#define QRW_DATASET_IO_HPP_

#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

#include "json.hpp"
#include "qrw/datagen.hpp"

namespace qrw {

// {"INTENT": {"substitution": {"replacement": [s, e], "replaced": [s, e]} |
// null, "deletions": [...]}, ...} with all five use cases present.
nlohmann::json ProgramToJson(const EditProgram &program);
// Missing use-case keys mean no edits. Throws InvalidInputError.
EditProgram ProgramFromJson(const nlohmann::json &j);

nlohmann::json ExampleToJson(const LabeledExample &ex);
LabeledExample ExampleFromJson(const nlohmann::json &j);

// One compact JSON object per line.
void WriteDataset(std::ostream &out, const std::vector<LabeledExample> &examples);
void WriteDataset(const std::filesystem::path &path,
                  const std::vector<LabeledExample> &examples);

// Throws ParseError carrying the 1-based line number of a malformed record.
std::vector<LabeledExample> ReadDataset(std::istream &in);
std::vector<LabeledExample> ReadDataset(const std::filesystem::path &path);

}  // namespace qrw

#endif  // QRW_DATASET_IO_HPP_
