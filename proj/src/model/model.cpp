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


#include "qrw/model/model.hpp"

#include "qrw/errors.hpp"
#include "qrw/model/decode.hpp"
#include "qrw/model/kernels.hpp"

namespace qrw {

Model Model::Create(const ModelConfig &config, Vocabulary vocab) {
  config.Validate();
  Model m{config, std::move(vocab), {}};
  m.params = ParamSet<float>(std::make_shared<ParamLayout>(config, m.vocab.size()));
  InitParams(m.params, config, config.seed);
  if (config.embedding_mode == EmbeddingMode::kFrozenExternal) {
    LoadExternalEmbeddings(m.params, m.vocab, config.embedding_path);
  }
  return m;
}

ForwardOutput<float> Model::Run(const TokenSequence &seq) const {
  const auto ids = vocab.Ids(seq);
  return Forward<float>(params, config, ids, nullptr, nullptr);
}

EditProgram Model::Predict(const TokenSequence &seq) const {
  return Decode(Run(seq), seq);
}

namespace {

Prediction Finish(const TokenSequence &seq, EditProgram program) {
  Prediction p{std::move(program), std::nullopt};
  try {
    p.result = ApplyProgram(seq, p.program);
  } catch (const EmptyRewriteError &) {
  } catch (const CyclicDependencyError &) {
  }
  return p;
}

}  // namespace

Prediction PredictRewrite(const Model &model, const TokenSequence &seq) {
  return Finish(seq, model.Predict(seq));
}

std::vector<Prediction> PredictRewrites(const Model &model,
                                        std::span<const TokenSequence> inputs,
                                        bool parallel) {
  auto programs = parallel
                      ? PredictParallel(model.params, model.config, model.vocab, inputs)
                      : PredictSerial(model.params, model.config, model.vocab, inputs);
  std::vector<Prediction> out;
  out.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    out.push_back(Finish(inputs[i], std::move(programs[i])));
  }
  return out;
}

}  // namespace qrw
