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


#include "qrw/model/parameters.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qrw/errors.hpp"

namespace qrw {

ParamLayout::ParamLayout(const ModelConfig &config, int vocab_size) {
  config.Validate();
  const int e = config.embed_dim, h = config.hidden_dim, p = config.proj_dim;
  const int enc = config.encoder_dim();
  embedding = Add("embedding", e, vocab_size,
                  config.embedding_mode == EmbeddingMode::kTrainable);
  const char *dirs[2] = {"fwd", "bwd"};
  for (int d = 0; d < 2; ++d) {
    const std::string pre = std::string("lstm.") + dirs[d] + ".";
    lstm[d].w_ih = Add(pre + "w_ih", 4 * h, e);
    lstm[d].w_hh = Add(pre + "w_hh", 4 * h, h);
    lstm[d].bias = Add(pre + "bias", 4 * h, 1);
  }
  for (UseCase u : kAllUseCases) {
    const std::string pre = "head." + std::string(UseCaseName(u)) + ".";
    auto &hd = heads[Index(u)];
    hd.rd_w = Add(pre + "rd.w", 3, enc);
    hd.rd_b = Add(pre + "rd.b", 3, 1);
    hd.del_w = Add(pre + "del.w", 2, enc);
    hd.del_b = Add(pre + "del.b", 2, 1);
    hd.q_w = Add(pre + "rr.q_w", p, enc);
    hd.q_b = Add(pre + "rr.q_b", p, 1);
    hd.k_w = Add(pre + "rr.k_w", p, enc);
    hd.k_b = Add(pre + "rr.k_b", p, 1);
    hd.bil_w = Add(pre + "rr.w", p, p);
    hd.bil_bq = Add(pre + "rr.bq", p, 1);
    hd.bil_bk = Add(pre + "rr.bk", p, 1);
    hd.bil_c = Add(pre + "rr.c", 1, 1);
  }
}

int ParamLayout::Add(std::string name, int rows, int cols, bool trainable) {
  specs_.push_back({std::move(name), rows, cols, total_, trainable});
  total_ += specs_.back().size();
  return static_cast<int>(specs_.size()) - 1;
}

int ParamLayout::Find(const std::string &name) const {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (specs_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void InitParams(ParamSet<float> &params, const ModelConfig &config,
                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto &layout = params.layout();
  auto uniform = [&](int idx, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    auto m = params[idx];
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<float>(dist(rng));
    }
  };
  auto glorot = [&](int idx) {
    const auto &s = layout.spec(idx);
    uniform(idx, std::sqrt(6.0 / (s.rows + s.cols)));
  };
  params.flat().setZero();
  {
    std::normal_distribution<double> dist(0.0, 0.1);
    auto m = params[layout.embedding];
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<float>(dist(rng));
    }
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(config.hidden_dim));
  for (const auto &l : layout.lstm) {
    uniform(l.w_ih, bound);
    uniform(l.w_hh, bound);
    params[l.bias].block(config.hidden_dim, 0, config.hidden_dim, 1).setOnes();
  }
  for (const auto &hd : layout.heads) {
    for (int idx : {hd.rd_w, hd.del_w, hd.q_w, hd.k_w, hd.bil_w}) glorot(idx);
  }
}

void LoadExternalEmbeddings(ParamSet<float> &params, const Vocabulary &vocab,
                            const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open embeddings " + path);
  auto table = params[params.layout().embedding];
  table.setZero();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string token;
    if (!(ss >> token)) continue;
    std::vector<float> v;
    float x;
    while (ss >> x) v.push_back(x);
    if (static_cast<Eigen::Index>(v.size()) != table.rows()) {
      throw ParseError(lineno, "embedding width " + std::to_string(v.size()) +
                                   ", expected " + std::to_string(table.rows()));
    }
    const int id = token == kSepToken ? Vocabulary::kSep : vocab.Id(token);
    if (id == Vocabulary::kUnk && token != vocab.Token(Vocabulary::kUnk)) continue;
    for (std::size_t i = 0; i < v.size(); ++i) table(i, id) = v[i];
  }
}

}  // namespace qrw
