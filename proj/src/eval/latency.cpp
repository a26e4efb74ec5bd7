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


#include "qrw/eval/latency.hpp"

#include <omp.h>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "qrw/errors.hpp"
#include "qrw/model/network.hpp"

namespace qrw {

namespace {

class SingleThreaded {
 public:
  SingleThreaded() : eigen_(Eigen::nbThreads()), omp_(omp_get_max_threads()) {
    Eigen::setNbThreads(1);
    omp_set_num_threads(1);
  }
  ~SingleThreaded() {
    Eigen::setNbThreads(eigen_);
    omp_set_num_threads(omp_);
  }

 private:
  int eigen_, omp_;
};

double Percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

double Median(std::vector<double> v) { return Percentile(std::move(v), 0.5); }

template <typename F>
double TimeUs(F &&f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

std::string HardwareNote() {
  std::string cpu = "unknown cpu";
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) cpu = line.substr(colon + 2);
      break;
    }
  }
  return cpu + ", " + std::to_string(std::thread::hardware_concurrency()) +
         " hardware threads, timed single-threaded";
}

LatencyReport LatencyBench(const Model &model, std::span<const TokenSequence> inputs,
                           int warmup, int reps) {
  if (reps < 100) {
    throw InvalidInputError("latency bench needs at least 100 reps, got " +
                            std::to_string(reps));
  }
  if (inputs.empty()) throw InvalidInputError("latency bench needs at least one query");
  SingleThreaded guard;

  std::vector<int> rewrite_len(inputs.size(), 0);
  for (int w = 0; w < warmup; ++w) {
    for (const auto &seq : inputs) (void)PredictRewrite(model, seq);
  }
  ResetEncoderInvocations();
  std::vector<std::vector<double>> per_query(inputs.size());
  std::vector<double> all;
  all.reserve(inputs.size() * static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      Prediction p;
      const double us = TimeUs([&] { p = PredictRewrite(model, inputs[i]); });
      if (r == 0) rewrite_len[i] = p.result ? static_cast<int>(p.result->tokens.size()) : 0;
      per_query[i].push_back(us);
      all.push_back(us);
    }
  }
  const auto calls = EncoderInvocations();

  LatencyReport rep;
  rep.queries = inputs.size();
  rep.reps = reps;
  rep.p50_us = Percentile(all, 0.50);
  rep.p95_us = Percentile(all, 0.95);
  rep.encoder_calls_per_query =
      static_cast<double>(calls) / static_cast<double>(inputs.size() * reps);
  rep.hardware = HardwareNote();

  const auto n = static_cast<Eigen::Index>(inputs.size());
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  std::map<int, std::vector<std::size_t>> by_len;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double med = Median(per_query[k]);
    X(i, 0) = 1;
    X(i, 1) = rewrite_len[k];
    X(i, 2) = static_cast<double>(inputs[k].size());
    y(i) = med;
    by_len[rewrite_len[k]].push_back(k);
  }
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
  rep.slope_us_per_token = beta(1);
  rep.input_slope_us_per_token = beta(2);
  rep.min_rewrite_length = by_len.begin()->first;
  rep.max_rewrite_length = by_len.rbegin()->first;
  rep.normalized_slope = rep.slope_us_per_token / rep.p50_us;
  rep.range_normalized_slope = rep.normalized_slope *
                               (rep.max_rewrite_length - rep.min_rewrite_length);
  for (const auto &[len, idx] : by_len) {
    LengthBucket b;
    b.rewrite_length = len;
    b.queries = idx.size();
    std::vector<double> meds;
    double tsum = 0;
    for (auto k : idx) {
      meds.push_back(y(static_cast<Eigen::Index>(k)));
      tsum += static_cast<double>(inputs[k].size());
    }
    b.median_us = Median(meds);
    b.mean_input_length = tsum / static_cast<double>(idx.size());
    rep.buckets.push_back(b);
  }
  return rep;
}

std::vector<ScalingRow> EncoderScaling(const Model &model, const std::vector<int> &lengths,
                                       int reps) {
  SingleThreaded guard;
  std::vector<ScalingRow> rows;
  for (int T : lengths) {
    std::vector<std::string> words;
    for (int i = 0; i < T; ++i) words.push_back("w" + std::to_string(i));
    const auto seq = ConcatTurns({}, words);
    std::vector<double> times;
    for (int r = 0; r < reps; ++r) times.push_back(TimeUs([&] { (void)model.Run(seq); }));
    rows.push_back({T, Median(times)});
  }
  return rows;
}

nlohmann::json LatencyToJson(const LatencyReport &r) {
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto &b : r.buckets) {
    buckets.push_back({{"rewrite_length", b.rewrite_length},
                       {"queries", b.queries},
                       {"median_us", b.median_us},
                       {"mean_input_length", b.mean_input_length}});
  }
  return {{"queries", r.queries},
          {"reps", r.reps},
          {"p50_us", r.p50_us},
          {"p95_us", r.p95_us},
          {"slope_us_per_token", r.slope_us_per_token},
          {"input_slope_us_per_token", r.input_slope_us_per_token},
          {"normalized_slope", r.normalized_slope},
          {"range_normalized_slope", r.range_normalized_slope},
          {"min_rewrite_length", r.min_rewrite_length},
          {"max_rewrite_length", r.max_rewrite_length},
          {"encoder_calls_per_query", r.encoder_calls_per_query},
          {"buckets", buckets},
          {"hardware", r.hardware}};
}

LatencyReport LatencyFromJson(const nlohmann::json &j) {
  LatencyReport r;
  try {
    r.queries = j.at("queries");
    r.reps = j.at("reps");
    r.p50_us = j.at("p50_us");
    r.p95_us = j.at("p95_us");
    r.slope_us_per_token = j.at("slope_us_per_token");
    r.input_slope_us_per_token = j.at("input_slope_us_per_token");
    r.normalized_slope = j.at("normalized_slope");
    r.range_normalized_slope = j.at("range_normalized_slope");
    r.min_rewrite_length = j.at("min_rewrite_length");
    r.max_rewrite_length = j.at("max_rewrite_length");
    r.encoder_calls_per_query = j.at("encoder_calls_per_query");
    for (const auto &b : j.at("buckets")) {
      r.buckets.push_back({b.at("rewrite_length"), b.at("queries"), b.at("median_us"),
                           b.at("mean_input_length")});
    }
    r.hardware = j.at("hardware");
  } catch (const nlohmann::json::exception &e) {
    throw InvalidInputError(std::string("malformed latency report: ") + e.what());
  }
  return r;
}

std::string FormatLatency(const LatencyReport &r) {
  std::ostringstream out;
  char line[512];
  std::snprintf(line, sizeof(line),
                "queries %zu x %d reps\np50 %.1f us  p95 %.1f us\n"
                "slope %.3f us/token (input length %.3f us/token)\n"
                "normalized slope %.4f of p50 per token, %.4f across rewrite lengths %d-%d\n"
                "encoder calls per query %.3f\n",
                r.queries, r.reps, r.p50_us, r.p95_us, r.slope_us_per_token,
                r.input_slope_us_per_token, r.normalized_slope, r.range_normalized_slope,
                r.min_rewrite_length,
                r.max_rewrite_length, r.encoder_calls_per_query);
  out << line;
  out << "rewrite_len  queries  median_us  mean_input_len\n";
  for (const auto &b : r.buckets) {
    std::snprintf(line, sizeof(line), "%11d  %7zu  %9.1f  %14.2f\n", b.rewrite_length,
                  b.queries, b.median_us, b.mean_input_length);
    out << line;
  }
  out << r.hardware << '\n';
  return out.str();
}

}  // namespace qrw
