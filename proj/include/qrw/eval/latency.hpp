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


#ifndef QRW_EVAL_LATENCY_HPP_
#define QRW_EVAL_LATENCY_HPP_

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qrw/edit_engine.hpp"
#include "qrw/model/model.hpp"

namespace qrw {

struct LengthBucket {
  int rewrite_length = 0;
  std::size_t queries = 0;
  double median_us = 0;
  double mean_input_length = 0;
};

struct LatencyReport {
  std::size_t queries = 0;
  int reps = 0;
  double p50_us = 0;
  double p95_us = 0;
  // Least-squares coefficient of per-query median latency on predicted
  // rewrite length, with input length as a second regressor.
  double slope_us_per_token = 0;
  // Input-length coefficient of the same fit.
  double input_slope_us_per_token = 0;
  // slope / p50: latency added per rewrite token, as a fraction of p50.
  double normalized_slope = 0;
  // slope * (max_len - min_len) / p50: the change the fit predicts across the
  // measured rewrite-length range.
  double range_normalized_slope = 0;
  int min_rewrite_length = 0;
  int max_rewrite_length = 0;
  double encoder_calls_per_query = 0;
  std::vector<LengthBucket> buckets;
  std::string hardware;
};

// Single-threaded timing of predict-and-apply for every input, `warmup`
// untimed passes then `reps` timed passes over the whole set. Throws
// InvalidInputError when reps < 100 or the set is empty.
LatencyReport LatencyBench(const Model &model, std::span<const TokenSequence> inputs,
                           int warmup, int reps);

struct ScalingRow {
  int input_length = 0;
  double median_us = 0;
};

// Median encoder-plus-heads time for synthetic inputs of each length.
std::vector<ScalingRow> EncoderScaling(const Model &model, const std::vector<int> &lengths,
                                       int reps);

nlohmann::json LatencyToJson(const LatencyReport &r);
LatencyReport LatencyFromJson(const nlohmann::json &j);
std::string FormatLatency(const LatencyReport &r);

std::string HardwareNote();

}  // namespace qrw

#endif  // QRW_EVAL_LATENCY_HPP_
