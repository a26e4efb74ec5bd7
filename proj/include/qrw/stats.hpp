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


#ifndef QRW_STATS_HPP_
#define QRW_STATS_HPP_

#include <span>
#include <string>

#include "json.hpp"
#include "qrw/datagen.hpp"

namespace qrw {

struct DatasetStats {
  std::size_t count = 0;
  double context_mean = 0;
  double followup_mean = 0;
  double rewrite_mean = 0;
  // Share of rewrite tokens whose text occurs in the context but not in the
  // follow-up, pooled over the dataset.
  double context_only_fraction = 0;
};

// Throws InvalidInputError on an empty dataset.
DatasetStats ComputeStats(std::span<const LabeledExample> examples);

nlohmann::json StatsToJson(const DatasetStats &s);
// Throws InvalidInputError.
DatasetStats StatsFromJson(const nlohmann::json &j);
std::string FormatStats(const DatasetStats &s);

}  // namespace qrw

#endif  // QRW_STATS_HPP_
