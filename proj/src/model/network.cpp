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


#include "qrw/model/network.hpp"

#include <atomic>

#include "qrw/errors.hpp"

namespace qrw {

namespace {

std::atomic<std::uint64_t> g_encoder_invocations{0};

template <typename S>
void ColumnSoftmax(Mat<S> &m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    auto col = m.col(j);
    col.array() = (col.array() - col.maxCoeff()).exp();
    col /= col.sum();
  }
}

template <typename S>
void RowSoftmax(Mat<S> &m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    row.array() = (row.array() - row.maxCoeff()).exp();
    row /= row.sum();
  }
}

template <typename S>
auto Sigmoid(const Eigen::ArrayBase<S> &x) {
  using T = typename S::Scalar;
  return (T(1) + (-x).exp()).inverse();
}

}  // namespace

std::uint64_t EncoderInvocations() { return g_encoder_invocations.load(); }
void ResetEncoderInvocations() { g_encoder_invocations.store(0); }

template <typename S>
Mat<S> Encode(const ParamSet<S> &params, const ModelConfig &config,
              std::span<const int> ids, std::mt19937_64 *dropout_rng,
              ForwardCache<S> *cache) {
  const int T = static_cast<int>(ids.size());
  if (T < 1 || T > config.max_len) {
    throw LengthError("sequence length " + std::to_string(T) + " outside [1, " +
                      std::to_string(config.max_len) + "]");
  }
  g_encoder_invocations.fetch_add(1, std::memory_order_relaxed);
  const auto &layout = params.layout();
  const int h = config.hidden_dim;

  ForwardCache<S> local;
  ForwardCache<S> &c = cache ? *cache : local;
  c.ids.assign(ids.begin(), ids.end());
  const auto table = params[layout.embedding];
  c.X.resize(config.embed_dim, T);
  for (int t = 0; t < T; ++t) {
    if (ids[t] < 0 || ids[t] >= table.cols()) throw InvalidInputError("token id out of range");
    c.X.col(t) = table.col(ids[t]);
  }

  Mat<S> H(2 * h, T);
  for (int d = 0; d < 2; ++d) {
    const auto &li = layout.lstm[d];
    const auto w_hh = params[li.w_hh];
    auto &dir = c.dir[d];
    dir.gates.noalias() = params[li.w_ih] * c.X;
    dir.gates.colwise() += params[li.bias].col(0);
    dir.c.resize(h, T);
    dir.h.resize(h, T);
    Vec<S> h_prev = Vec<S>::Zero(h), c_prev = Vec<S>::Zero(h);
    for (int step = 0; step < T; ++step) {
      const int t = d == 0 ? step : T - 1 - step;
      auto z = dir.gates.col(t);
      z.noalias() += w_hh * h_prev;
      z.segment(0, 2 * h) = Sigmoid(z.segment(0, 2 * h).array()).matrix();
      z.segment(2 * h, h) = z.segment(2 * h, h).array().tanh().matrix();
      z.segment(3 * h, h) = Sigmoid(z.segment(3 * h, h).array()).matrix();
      c_prev = z.segment(h, h).cwiseProduct(c_prev) +
               z.segment(0, h).cwiseProduct(z.segment(2 * h, h));
      h_prev = z.segment(3 * h, h).cwiseProduct(c_prev.array().tanh().matrix());
      dir.c.col(t) = c_prev;
      dir.h.col(t) = h_prev;
    }
    H.block(d * h, 0, h, T) = dir.h;
  }

  c.mask.resize(0, 0);
  if (dropout_rng && config.dropout > 0) {
    std::bernoulli_distribution keep(1.0 - config.dropout);
    const S scale = static_cast<S>(1.0 / (1.0 - config.dropout));
    c.mask.resize(H.rows(), H.cols());
    for (Eigen::Index j = 0; j < H.cols(); ++j) {
      for (Eigen::Index i = 0; i < H.rows(); ++i) {
        c.mask(i, j) = keep(*dropout_rng) ? scale : S(0);
      }
    }
    H.array() *= c.mask.array();
  }
  return H;
}

template <typename S>
void HeadsForward(const ParamSet<S> &params, const ModelConfig &config,
                  const Mat<S> &H, ForwardOutput<S> &out, ForwardCache<S> *cache,
                  const std::array<bool, kNumUseCases> &need_rr) {
  (void)config;
  const auto &layout = params.layout();
  out.T = static_cast<int>(H.cols());
  for (std::size_t u = 0; u < kNumUseCases; ++u) {
    const auto &hd = layout.heads[u];
    out.rd[u].noalias() = params[hd.rd_w] * H;
    out.rd[u].colwise() += params[hd.rd_b].col(0);
    ColumnSoftmax(out.rd[u]);
    out.del[u].noalias() = params[hd.del_w] * H;
    out.del[u].colwise() += params[hd.del_b].col(0);
    ColumnSoftmax(out.del[u]);

    if (!need_rr[u]) {
      out.rr[u].resize(0, 0);
      continue;
    }
    Mat<S> q = params[hd.q_w] * H;
    q.colwise() += params[hd.q_b].col(0);
    q = q.array().tanh().matrix();
    Mat<S> k = params[hd.k_w] * H;
    k.colwise() += params[hd.k_b].col(0);
    k = k.array().tanh().matrix();
    const Mat<S> wk = params[hd.bil_w] * k;
    out.rr[u].noalias() = q.transpose() * wk;
    const Vec<S> row_bias = q.transpose() * params[hd.bil_bq].col(0);
    const Vec<S> col_bias = k.transpose() * params[hd.bil_bk].col(0);
    out.rr[u].colwise() += row_bias;
    out.rr[u].rowwise() += col_bias.transpose();
    out.rr[u].array() += params[hd.bil_c](0, 0);
    RowSoftmax(out.rr[u]);
    if (cache) {
      cache->q[u] = std::move(q);
      cache->k[u] = std::move(k);
    }
  }
}

template <typename S>
ForwardOutput<S> Forward(const ParamSet<S> &params, const ModelConfig &config,
                         std::span<const int> ids, std::mt19937_64 *dropout_rng,
                         ForwardCache<S> *cache, const LabelTensors *labels) {
  ForwardOutput<S> out;
  out.H = Encode(params, config, ids, dropout_rng, cache);
  std::array<bool, kNumUseCases> need_rr;
  for (std::size_t u = 0; u < kNumUseCases; ++u) {
    need_rr[u] = labels == nullptr || labels->use_cases[u].has_replacement;
  }
  HeadsForward(params, config, out.H, out, cache, need_rr);
  if (cache) cache->Hd = out.H;
  return out;
}

template <typename S>
void Backward(const ParamSet<S> &params, const ModelConfig &config,
              const ForwardCache<S> &cache, const ForwardOutput<S> &out,
              const LabelTensors &labels, S scale, ParamSet<S> &grad) {
  const auto &layout = params.layout();
  const int T = out.T;
  const int h = config.hidden_dim;
  const S per_uc = scale / static_cast<S>(kNumUseCases);
  const Mat<S> &Hd = cache.Hd;
  Mat<S> dH = Mat<S>::Zero(Hd.rows(), T);

  for (std::size_t u = 0; u < kNumUseCases; ++u) {
    const auto &hd = layout.heads[u];
    const auto &l = labels.use_cases[u];

    Mat<S> d_rd = out.rd[u];
    for (int t = 0; t < T; ++t) d_rd(l.rd[t], t) -= S(1);
    d_rd *= per_uc;
    grad[hd.rd_w].noalias() += d_rd * Hd.transpose();
    grad[hd.rd_b].col(0) += d_rd.rowwise().sum();
    dH.noalias() += params[hd.rd_w].transpose() * d_rd;

    Mat<S> d_del = out.del[u];
    for (int t = 0; t < T; ++t) d_del(l.del[t], t) -= S(1);
    d_del *= per_uc;
    grad[hd.del_w].noalias() += d_del * Hd.transpose();
    grad[hd.del_b].col(0) += d_del.rowwise().sum();
    dH.noalias() += params[hd.del_w].transpose() * d_del;

    if (!l.has_replacement) continue;
    Mat<S> dS = Mat<S>::Zero(T, T);
    for (int k = 0; k < 2; ++k) {
      dS.row(l.rr_query[k]) += out.rr[u].row(l.rr_query[k]);
      dS(l.rr_query[k], l.rr_target[k]) -= S(1);
    }
    dS *= scale;
    const Mat<S> &q = cache.q[u];
    const Mat<S> &k = cache.k[u];
    const auto w = params[hd.bil_w];
    const Vec<S> rs = dS.rowwise().sum();
    const Vec<S> cs = dS.colwise().sum().transpose();
    grad[hd.bil_w].noalias() += q * dS * k.transpose();
    grad[hd.bil_bq].col(0) += q * rs;
    grad[hd.bil_bk].col(0) += k * cs;
    grad[hd.bil_c](0, 0) += dS.sum();
    Mat<S> dq = (w * k) * dS.transpose();
    dq.noalias() += params[hd.bil_bq].col(0) * rs.transpose();
    Mat<S> dk = (w.transpose() * q) * dS;
    dk.noalias() += params[hd.bil_bk].col(0) * cs.transpose();
    dq.array() *= S(1) - q.array().square();
    dk.array() *= S(1) - k.array().square();
    grad[hd.q_w].noalias() += dq * Hd.transpose();
    grad[hd.q_b].col(0) += dq.rowwise().sum();
    grad[hd.k_w].noalias() += dk * Hd.transpose();
    grad[hd.k_b].col(0) += dk.rowwise().sum();
    dH.noalias() += params[hd.q_w].transpose() * dq;
    dH.noalias() += params[hd.k_w].transpose() * dk;
  }

  if (cache.mask.size() > 0) dH.array() *= cache.mask.array();

  Mat<S> dX = Mat<S>::Zero(config.embed_dim, T);
  for (int d = 0; d < 2; ++d) {
    const auto &li = layout.lstm[d];
    const auto &dir = cache.dir[d];
    const auto w_hh = params[li.w_hh];
    Mat<S> dZ(4 * h, T);
    Mat<S> h_prev_all = Mat<S>::Zero(h, T);
    Vec<S> dh_next = Vec<S>::Zero(h), dc_next = Vec<S>::Zero(h);
    for (int step = T - 1; step >= 0; --step) {
      const int t = d == 0 ? step : T - 1 - step;
      const int prev = d == 0 ? t - 1 : t + 1;
      const bool has_prev = step > 0;
      const auto g = dir.gates.col(t);
      const auto i_g = g.segment(0, h).array();
      const auto f_g = g.segment(h, h).array();
      const auto g_g = g.segment(2 * h, h).array();
      const auto o_g = g.segment(3 * h, h).array();
      const Eigen::Array<S, Eigen::Dynamic, 1> tc = dir.c.col(t).array().tanh();
      const Eigen::Array<S, Eigen::Dynamic, 1> dh =
          dH.block(d * h, t, h, 1).array() + dh_next.array();
      const Eigen::Array<S, Eigen::Dynamic, 1> dc =
          dh * o_g * (S(1) - tc.square()) + dc_next.array();
      Eigen::Array<S, Eigen::Dynamic, 1> c_prev = Eigen::Array<S, Eigen::Dynamic, 1>::Zero(h);
      if (has_prev) {
        c_prev = dir.c.col(prev).array();
        h_prev_all.col(t) = dir.h.col(prev);
      }
      auto dz = dZ.col(t);
      dz.segment(0, h) = (dc * g_g * i_g * (S(1) - i_g)).matrix();
      dz.segment(h, h) = (dc * c_prev * f_g * (S(1) - f_g)).matrix();
      dz.segment(2 * h, h) = (dc * i_g * (S(1) - g_g.square())).matrix();
      dz.segment(3 * h, h) = (dh * tc * o_g * (S(1) - o_g)).matrix();
      dc_next = (dc * f_g).matrix();
      dh_next.noalias() = w_hh.transpose() * dz;
    }
    grad[li.w_ih].noalias() += dZ * cache.X.transpose();
    grad[li.w_hh].noalias() += dZ * h_prev_all.transpose();
    grad[li.bias].col(0) += dZ.rowwise().sum();
    dX.noalias() += params[li.w_ih].transpose() * dZ;
  }

  if (layout.spec(layout.embedding).trainable) {
    auto g_emb = grad[layout.embedding];
    for (int t = 0; t < T; ++t) g_emb.col(cache.ids[t]) += dX.col(t);
  }
}

#define QRW_INSTANTIATE(S)                                                     \
  template Mat<S> Encode<S>(const ParamSet<S> &, const ModelConfig &,          \
                            std::span<const int>, std::mt19937_64 *,           \
                            ForwardCache<S> *);                                \
  template void HeadsForward<S>(const ParamSet<S> &, const ModelConfig &,      \
                                const Mat<S> &, ForwardOutput<S> &,            \
                                ForwardCache<S> *,                             \
                                const std::array<bool, kNumUseCases> &);       \
  template ForwardOutput<S> Forward<S>(const ParamSet<S> &,                    \
                                       const ModelConfig &,                    \
                                       std::span<const int>,                   \
                                       std::mt19937_64 *, ForwardCache<S> *,   \
                                       const LabelTensors *);                  \
  template void Backward<S>(const ParamSet<S> &, const ModelConfig &,          \
                            const ForwardCache<S> &, const ForwardOutput<S> &, \
                            const LabelTensors &, S, ParamSet<S> &);

QRW_INSTANTIATE(float)
QRW_INSTANTIATE(double)

#undef QRW_INSTANTIATE

}  // namespace qrw
