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


// Serial vs OpenMP kernels: batch gradient and batched prediction.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <vector>

#include "qrw/datagen.hpp"
#include "qrw/model/kernels.hpp"
#include "qrw/model/model.hpp"

namespace qrw {
namespace {

struct Fixture {
  Model model;
  std::vector<TrainingExample> prepared;
  std::vector<TokenSequence> inputs;
};

const Fixture &Shared() {
  static const Fixture f = [] {
    const auto gen = DataGenerator::FromDirectory(QRW_DATA_DIR);
    std::vector<LabeledExample> data;
    for (UseCase u : kAllUseCases) {
      auto part = gen.GenerateSingleTask(u, 64, 7);
      data.insert(data.end(), part.begin(), part.end());
    }
    ModelConfig config;
    Fixture out{Model::Create(config, Vocabulary::Build(data)), {}, {}};
    out.prepared = PrepareExamples(data, out.model.vocab);
    for (const auto &ex : data) out.inputs.push_back(ex.Sequence());
    return out;
  }();
  return f;
}

std::vector<const TrainingExample *> Batch(const Fixture &f, std::size_t n) {
  std::vector<const TrainingExample *> batch;
  for (std::size_t i = 0; i < n; ++i) batch.push_back(&f.prepared[i % f.prepared.size()]);
  return batch;
}

void BM_GradientSerial(benchmark::State &state) {
  const auto &f = Shared();
  const auto batch = Batch(f, static_cast<std::size_t>(state.range(0)));
  ParamSet<float> grad(f.model.params.layout_ptr());
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        BatchGradientSerial<float>(f.model.params, f.model.config, batch, 1, true, grad));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GradientParallel(benchmark::State &state) {
  const auto &f = Shared();
  const auto batch = Batch(f, static_cast<std::size_t>(state.range(0)));
  ParamSet<float> grad(f.model.params.layout_ptr());
  std::vector<ParamSet<float>> scratch;
  for (auto _ : state) {
    benchmark::DoNotOptimize(BatchGradientParallel<float>(f.model.params, f.model.config,
                                                          batch, 1, true, grad, scratch));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

void BM_PredictSerial(benchmark::State &state) {
  const auto &f = Shared();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        PredictSerial(f.model.params, f.model.config, f.model.vocab, f.inputs));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.inputs.size()));
}

void BM_PredictParallel(benchmark::State &state) {
  const auto &f = Shared();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        PredictParallel(f.model.params, f.model.config, f.model.vocab, f.inputs));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.inputs.size()));
  state.counters["threads"] = omp_get_max_threads();
}

BENCHMARK(BM_GradientSerial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradientParallel)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictParallel)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace qrw

BENCHMARK_MAIN();
