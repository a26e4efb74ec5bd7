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


#include "qrw/stats.hpp"

#include <algorithm>
#include <cstdio>

#include "qrw/errors.hpp"

namespace qrw {

DatasetStats ComputeStats(std::span<const LabeledExample> examples) {
  if (examples.empty()) throw InvalidInputError("stats of an empty dataset");
  DatasetStats s;
  s.count = examples.size();
  std::size_t ctx = 0, fu = 0, rw = 0, context_only = 0;
  for (const auto &ex : examples) {
    ctx += ex.context.size();
    fu += ex.followup.size();
    rw += ex.rewrite.size();
    for (const auto &t : ex.rewrite) {
      const bool in_ctx = std::find(ex.context.begin(), ex.context.end(), t) != ex.context.end();
      const bool in_fu = std::find(ex.followup.begin(), ex.followup.end(), t) != ex.followup.end();
      if (in_ctx && !in_fu) ++context_only;
    }
  }
  const double n = static_cast<double>(s.count);
  s.context_mean = ctx / n;
  s.followup_mean = fu / n;
  s.rewrite_mean = rw / n;
  s.context_only_fraction = rw ? static_cast<double>(context_only) / rw : 0.0;
  return s;
}

nlohmann::json StatsToJson(const DatasetStats &s) {
  return {{"count", s.count},
          {"context_mean", s.context_mean},
          {"followup_mean", s.followup_mean},
          {"rewrite_mean", s.rewrite_mean},
          {"context_only_fraction", s.context_only_fraction}};
}

DatasetStats StatsFromJson(const nlohmann::json &j) {
  DatasetStats s;
  try {
    s.count = j.at("count");
    s.context_mean = j.at("context_mean");
    s.followup_mean = j.at("followup_mean");
    s.rewrite_mean = j.at("rewrite_mean");
    s.context_only_fraction = j.at("context_only_fraction");
  } catch (const nlohmann::json::exception &e) {
    throw InvalidInputError(std::string("malformed stats: ") + e.what());
  }
  return s;
}

std::string FormatStats(const DatasetStats &s) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "examples=%zu context=%.2f followup=%.2f rewrite=%.2f "
                "context_only=%.1f%%",
                s.count, s.context_mean, s.followup_mean, s.rewrite_mean,
                100.0 * s.context_only_fraction);
  return buf;
}

}  // namespace qrw
