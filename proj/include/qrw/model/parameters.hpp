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


#ifndef QRW_MODEL_PARAMETERS_HPP_
#define QRW_MODEL_PARAMETERS_HPP_

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "qrw/model/config.hpp"
#include "qrw/model/vocabulary.hpp"

namespace qrw {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

struct TensorSpec {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;
  bool trainable = true;
  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

struct LstmIndex {
  int w_ih, w_hh, bias;  // gates stacked i, f, g, o
};

struct HeadIndex {
  int rd_w, rd_b;    // 3 x 2h, 3
  int del_w, del_b;  // 2 x 2h, 2
  int q_w, q_b;      // p x 2h, p
  int k_w, k_b;      // p x 2h, p
  int bil_w;         // p x p
  int bil_bq, bil_bk, bil_c;  // p, p, 1
};

// Named tensors packed into one flat buffer, column-major each. The
// embedding table is embed_dim x vocab so a token's vector is one column.
class ParamLayout {
 public:
  ParamLayout(const ModelConfig &config, int vocab_size);

  const std::vector<TensorSpec> &specs() const { return specs_; }
  const TensorSpec &spec(int i) const { return specs_[i]; }
  std::size_t total() const { return total_; }
  int Find(const std::string &name) const;  // -1 if absent

  int embedding = 0;
  std::array<LstmIndex, 2> lstm{};  // forward, backward
  std::array<HeadIndex, kNumUseCases> heads{};

 private:
  int Add(std::string name, int rows, int cols, bool trainable = true);
  std::vector<TensorSpec> specs_;
  std::size_t total_ = 0;
};

// Parameter values (or gradients) laid out by a ParamLayout.
template <typename S>
class ParamSet {
 public:
  ParamSet() = default;
  explicit ParamSet(std::shared_ptr<const ParamLayout> layout)
      : layout_(std::move(layout)), data_(Vec<S>::Zero(layout_->total())) {}

  Eigen::Map<Mat<S>> operator[](int i) {
    const auto &s = layout_->spec(i);
    return {data_.data() + s.offset, s.rows, s.cols};
  }
  Eigen::Map<const Mat<S>> operator[](int i) const {
    const auto &s = layout_->spec(i);
    return {data_.data() + s.offset, s.rows, s.cols};
  }

  Vec<S> &flat() { return data_; }
  const Vec<S> &flat() const { return data_; }
  const ParamLayout &layout() const { return *layout_; }
  const std::shared_ptr<const ParamLayout> &layout_ptr() const { return layout_; }

  template <typename T>
  ParamSet<T> Cast() const {
    ParamSet<T> out(layout_);
    out.flat() = data_.template cast<T>();
    return out;
  }

 private:
  std::shared_ptr<const ParamLayout> layout_;
  Vec<S> data_;
};

// Uniform(+-1/sqrt(h)) LSTM weights with forget-gate bias 1, Glorot-uniform
// head weights, N(0, 0.1^2) embeddings, zero biases.
void InitParams(ParamSet<float> &params, const ModelConfig &config,
                std::uint64_t seed);

// Reads "<token> v_1 ... v_d" lines into the embedding table. Tokens missing
// from the file keep a zero vector.
void LoadExternalEmbeddings(ParamSet<float> &params, const Vocabulary &vocab,
                            const std::string &path);

}  // namespace qrw

#endif  // QRW_MODEL_PARAMETERS_HPP_
