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


#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures/gradcheck.hpp"
#include "fixtures/worked_examples.hpp"
#include "qrw/datagen.hpp"
#include "qrw/errors.hpp"
#include "qrw/model/decode.hpp"
#include "qrw/model/kernels.hpp"
#include "qrw/model/labels.hpp"
#include "qrw/model/loss.hpp"
#include "qrw/model/network.hpp"

namespace qrw {
namespace {

using fixtures::MaxRelativeGradientError;
using fixtures::RandomParams;
using fixtures::TwoExamples;

ModelConfig SmallConfig(int embed, int hidden, int proj) {
  ModelConfig c;
  c.embed_dim = embed;
  c.hidden_dim = hidden;
  c.proj_dim = proj;
  return c;
}

const TokenSequence &RepairRow() {
  static const TokenSequence seq = fixtures::Sequence(fixtures::WorkedExamples()[4]);
  return seq;
}

TEST_CASE("zero weights give zero states and uniform distributions") {
  const ModelConfig c;
  ParamSet<double> p(std::make_shared<ParamLayout>(c, 20));
  const std::vector<int> ids = {3, 4, 5, 2, 6, 7};
  const auto out = Forward<double>(p, c, ids, nullptr, nullptr);
  CHECK(out.H.rows() == 256);
  CHECK(out.H.cols() == 6);
  CHECK(out.H.cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t u = 0; u < kNumUseCases; ++u) {
    CHECK((out.rd[u].array() - 1.0 / 3).abs().maxCoeff() < 1e-15);
    CHECK((out.del[u].array() - 0.5).abs().maxCoeff() < 1e-15);
    CHECK((out.rr[u].array() - 1.0 / 6).abs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("single token input and eval-mode determinism") {
  ModelConfig c;
  ParamSet<float> p(std::make_shared<ParamLayout>(c, 10));
  InitParams(p, c, 3);
  const std::vector<int> one = {4};
  CHECK(Encode<float>(p, c, one, nullptr, nullptr).rows() == 256);
  CHECK(Encode<float>(p, c, one, nullptr, nullptr).cols() == 1);
  const std::vector<int> ids = {5, 6, 2, 7, 8, 9};
  const auto a = Encode<float>(p, c, ids, nullptr, nullptr);
  const auto b = Encode<float>(p, c, ids, nullptr, nullptr);
  CHECK(a == b);
  const std::vector<int> empty;
  CHECK_THROWS_AS(Encode<float>(p, c, empty, nullptr, nullptr), LengthError);
  const std::vector<int> too_long(c.max_len + 1, 4);
  CHECK_THROWS_AS(Encode<float>(p, c, too_long, nullptr, nullptr), LengthError);
}

// Scalar re-derivation of the network on embed = hidden = proj = 1.
struct ScalarToy {
  double emb[2];
  // [direction][gate i f g o]
  double w_ih[2][4], w_hh[2][4], b[2][4];
  double rd_w[3][2], rd_b[3], del_w[2][2], del_b[2];
  double q_w[2], q_b, k_w[2], k_b, w, bq, bk, c;
};

TEST_CASE("two-token toy matches a scalar forward pass") {
  const ModelConfig cfg = SmallConfig(1, 1, 1);
  ParamSet<double> p(std::make_shared<ParamLayout>(cfg, 5));
  const auto &L = p.layout();
  ScalarToy toy{};
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(-1, 1);
  auto r = [&] { return dist(rng); };
  for (double &x : toy.emb) x = r();
  for (int d = 0; d < 2; ++d) {
    for (int g = 0; g < 4; ++g) {
      toy.w_ih[d][g] = r();
      toy.w_hh[d][g] = r();
      toy.b[d][g] = r();
    }
  }
  for (auto &row : toy.rd_w) for (double &x : row) x = r();
  for (double &x : toy.rd_b) x = r();
  for (auto &row : toy.del_w) for (double &x : row) x = r();
  for (double &x : toy.del_b) x = r();
  for (double &x : toy.q_w) x = r();
  for (double &x : toy.k_w) x = r();
  toy.q_b = r(); toy.k_b = r(); toy.w = r(); toy.bq = r(); toy.bk = r(); toy.c = r();

  p[L.embedding](0, 3) = toy.emb[0];
  p[L.embedding](0, 4) = toy.emb[1];
  for (int d = 0; d < 2; ++d) {
    for (int g = 0; g < 4; ++g) {
      p[L.lstm[d].w_ih](g, 0) = toy.w_ih[d][g];
      p[L.lstm[d].w_hh](g, 0) = toy.w_hh[d][g];
      p[L.lstm[d].bias](g, 0) = toy.b[d][g];
    }
  }
  const auto &hd = L.heads[Index(UseCase::kRepair)];
  for (int k = 0; k < 3; ++k) {
    p[hd.rd_w](k, 0) = toy.rd_w[k][0];
    p[hd.rd_w](k, 1) = toy.rd_w[k][1];
    p[hd.rd_b](k, 0) = toy.rd_b[k];
  }
  for (int k = 0; k < 2; ++k) {
    p[hd.del_w](k, 0) = toy.del_w[k][0];
    p[hd.del_w](k, 1) = toy.del_w[k][1];
    p[hd.del_b](k, 0) = toy.del_b[k];
    p[hd.q_w](0, k) = toy.q_w[k];
    p[hd.k_w](0, k) = toy.k_w[k];
  }
  p[hd.q_b](0, 0) = toy.q_b;
  p[hd.k_b](0, 0) = toy.k_b;
  p[hd.bil_w](0, 0) = toy.w;
  p[hd.bil_bq](0, 0) = toy.bq;
  p[hd.bil_bk](0, 0) = toy.bk;
  p[hd.bil_c](0, 0) = toy.c;

  auto sig = [](double x) { return 1 / (1 + std::exp(-x)); };
  double h[2][2];  // [direction][position]
  for (int d = 0; d < 2; ++d) {
    double hp = 0, cp = 0;
    for (int s = 0; s < 2; ++s) {
      const int t = d == 0 ? s : 1 - s;
      const double x = toy.emb[t];
      double z[4];
      for (int g = 0; g < 4; ++g) z[g] = toy.w_ih[d][g] * x + toy.w_hh[d][g] * hp + toy.b[d][g];
      const double i = sig(z[0]), f = sig(z[1]), gg = std::tanh(z[2]), o = sig(z[3]);
      cp = f * cp + i * gg;
      hp = o * std::tanh(cp);
      h[d][t] = hp;
    }
  }
  const std::vector<int> ids = {3, 4};
  const auto out = Forward<double>(p, cfg, ids, nullptr, nullptr);
  const std::size_t u = Index(UseCase::kRepair);
  for (int t = 0; t < 2; ++t) {
    CHECK(out.H(0, t) == doctest::Approx(h[0][t]).epsilon(1e-12));
    CHECK(out.H(1, t) == doctest::Approx(h[1][t]).epsilon(1e-12));
    double logits[3], z = 0;
    for (int k = 0; k < 3; ++k) {
      logits[k] = toy.rd_w[k][0] * h[0][t] + toy.rd_w[k][1] * h[1][t] + toy.rd_b[k];
      z += std::exp(logits[k]);
    }
    for (int k = 0; k < 3; ++k) {
      CHECK(out.rd[u](k, t) == doctest::Approx(std::exp(logits[k]) / z).epsilon(1e-12));
    }
    double dl[2], dz = 0;
    for (int k = 0; k < 2; ++k) {
      dl[k] = toy.del_w[k][0] * h[0][t] + toy.del_w[k][1] * h[1][t] + toy.del_b[k];
      dz += std::exp(dl[k]);
    }
    CHECK(out.del[u](1, t) == doctest::Approx(std::exp(dl[1]) / dz).epsilon(1e-12));
  }
  double q[2], k[2];
  for (int t = 0; t < 2; ++t) {
    q[t] = std::tanh(toy.q_w[0] * h[0][t] + toy.q_w[1] * h[1][t] + toy.q_b);
    k[t] = std::tanh(toy.k_w[0] * h[0][t] + toy.k_w[1] * h[1][t] + toy.k_b);
  }
  for (int i = 0; i < 2; ++i) {
    double s[2], z = 0;
    for (int j = 0; j < 2; ++j) {
      s[j] = q[i] * toy.w * k[j] + toy.bq * q[i] + toy.bk * k[j] + toy.c;
      z += std::exp(s[j]);
    }
    for (int j = 0; j < 2; ++j) {
      CHECK(out.rr[u](i, j) == doctest::Approx(std::exp(s[j]) / z).epsilon(1e-12));
    }
  }
}

TEST_CASE("uniform predictions give ln 3, ln 2 and ln T") {
  const ModelConfig c;
  ParamSet<double> p(std::make_shared<ParamLayout>(c, 20));
  const auto &seq = RepairRow();
  const int T = seq.size();
  const auto labels = MakeLabels(seq, fixtures::WorkedExamples()[4].program);
  const std::vector<int> ids(T, 5);
  const auto out = Forward<double>(p, c, ids, nullptr, nullptr);
  const auto loss = ComputeLoss(out, labels);
  // Averaged over use cases and summed over positions: per position ln 3.
  CHECK(std::abs(loss.rd / T - std::log(3.0)) < 1e-9);
  CHECK(std::abs(loss.del / T - std::log(2.0)) < 1e-9);
  // One use case with a replacement, two boundaries.
  CHECK(std::abs(loss.rr / 2 - std::log(static_cast<double>(T))) < 1e-9);
  CHECK(loss.total == loss.rd + loss.rr + loss.del);
}

TEST_CASE("one-hot predictions have zero loss") {
  const auto &seq = RepairRow();
  const auto labels = MakeLabels(seq, fixtures::WorkedExamples()[4].program);
  const auto loss = ComputeLoss(OneHotOutput(labels), labels);
  CHECK(loss.total == 0.0);
}

TEST_CASE("handcrafted T=3 loss matches a scalar computation") {
  // Context "a", follow-up "b": a [SEP] b. ENTITY replaces b with a.
  const std::vector<std::string> ctx = {"a"}, fu = {"b"};
  const auto seq = ConcatTurns(ctx, fu);
  EditProgram prog;
  prog[UseCase::kEntity].substitution = Substitution{{0, 1}, {2, 3}};
  prog[UseCase::kSteering].deletions = {1};
  const auto labels = MakeLabels(seq, prog);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  ForwardOutput<double> out;
  out.T = 3;
  auto normalize_cols = [](Mat<double> &m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) /= m.col(j).sum();
  };
  for (std::size_t u = 0; u < kNumUseCases; ++u) {
    out.rd[u] = Mat<double>(3, 3);
    out.del[u] = Mat<double>(2, 3);
    out.rr[u] = Mat<double>(3, 3);
    for (auto *m : {&out.rd[u], &out.del[u], &out.rr[u]}) {
      for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = dist(rng);
    }
    normalize_cols(out.rd[u]);
    normalize_cols(out.del[u]);
    for (Eigen::Index i = 0; i < 3; ++i) out.rr[u].row(i) /= out.rr[u].row(i).sum();
  }

  // Gold classes written out by hand.
  // RD: ENTITY tags B O O, every other use case O O O.
  // Del: STEERING deletes position 1, all others keep.
  // RR: ENTITY rows 0 and 0 (one-token replacement) point at 2 and 2.
  double rd = 0, del = 0;
  for (int u = 0; u < 5; ++u) {
    for (int t = 0; t < 3; ++t) {
      const int tag = (u == 1 && t == 0) ? 1 : 0;
      rd -= std::log(out.rd[u](tag, t));
      const int d = (u == 4 && t == 1) ? 1 : 0;
      del -= std::log(out.del[u](d, t));
    }
  }
  const double rr = -std::log(out.rr[1](0, 2)) - std::log(out.rr[1](0, 2));
  const double expected = rd / 5 + del / 5 + rr;

  const auto loss = ComputeLoss(out, labels);
  CHECK(std::abs(loss.total - expected) < 1e-10);
  CHECK(std::abs(loss.rr - rr) < 1e-10);
}

TEST_CASE("pointer loss is gated on the replacement") {
  const auto &seq = RepairRow();
  const auto labels = MakeLabels(seq, fixtures::WorkedExamples()[4].program);
  const ModelConfig c = SmallConfig(8, 6, 5);
  const auto p = RandomParams(c, 20, 5);
  std::vector<int> ids;
  for (int t = 0; t < seq.size(); ++t) ids.push_back(3 + t % 10);
  auto out = Forward<double>(p, c, ids, nullptr, nullptr);
  const auto before = ComputeLoss(out, labels);
  for (UseCase u : kAllUseCases) {
    if (u == UseCase::kRepair) continue;
    out.rr[Index(u)].setConstant(0.123);
  }
  const auto after = ComputeLoss(out, labels);
  CHECK(before.total == after.total);
  out.rr[Index(UseCase::kRepair)](10, 3) *= 0.5;
  CHECK(ComputeLoss(out, labels).total != before.total);
}

TEST_CASE("labels out of range are rejected") {
  const auto &seq = RepairRow();
  auto labels = MakeLabels(seq, fixtures::WorkedExamples()[4].program);
  const auto out = OneHotOutput(labels);
  labels.use_cases[2].rr_target[0] = seq.size();
  CHECK_THROWS_AS(ComputeLoss(out, labels), InvalidInputError);
}

TEST_CASE("analytic gradients match finite differences") {
  ModelConfig c = SmallConfig(5, 4, 3);
  auto p = RandomParams(c, 16, 21);
  const auto data = TwoExamples();
  SUBCASE("eval mode") {
    const double err = MaxRelativeGradientError(c, p, data, false, 200, 1);
    MESSAGE("max relative error " << err);
    CHECK(err < 1e-4);
  }
  SUBCASE("with a fixed dropout mask") {
    c.dropout = 0.3;
    CHECK(MaxRelativeGradientError(c, p, data, true, 200, 2) < 1e-4);
  }
}

TEST_CASE("gradients vanish when the outputs already match the labels") {
  const ModelConfig c = SmallConfig(5, 4, 3);
  const auto p = RandomParams(c, 16, 4);
  const auto data = TwoExamples();
  ForwardCache<double> cache;
  Forward<double>(p, c, data[0].ids, nullptr, &cache);
  ParamSet<double> grad(p.layout_ptr());
  Backward<double>(p, c, cache, OneHotOutput(data[0].labels), data[0].labels, 1.0, grad);
  CHECK(grad.flat().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("frozen embeddings receive no gradient") {
  ModelConfig c = SmallConfig(5, 4, 3);
  c.embedding_mode = EmbeddingMode::kFrozenExternal;
  c.embedding_path = "unused";
  const auto p = RandomParams(c, 16, 8);
  const auto data = TwoExamples();
  std::vector<const TrainingExample *> batch = {&data[0], &data[1]};
  ParamSet<double> grad(p.layout_ptr());
  BatchGradientSerial<double>(p, c, batch, 1, true, grad);
  CHECK(grad[p.layout().embedding].cwiseAbs().maxCoeff() == 0.0);
  CHECK(grad.flat().cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("parallel batch gradient is deterministic and matches the serial one") {
  ModelConfig c = SmallConfig(16, 12, 8);
  ParamSet<float> p(std::make_shared<ParamLayout>(c, 16));
  InitParams(p, c, 5);
  std::vector<TrainingExample> data;
  for (int i = 0; i < 11; ++i) {
    for (auto &ex : TwoExamples()) data.push_back(ex);
  }
  std::vector<const TrainingExample *> batch;
  for (const auto &ex : data) batch.push_back(&ex);
  ParamSet<float> serial(p.layout_ptr()), par1(p.layout_ptr()), par2(p.layout_ptr());
  std::vector<ParamSet<float>> scratch;
  const auto ls = BatchGradientSerial<float>(p, c, batch, 3, true, serial);
  const auto l1 = BatchGradientParallel<float>(p, c, batch, 3, true, par1, scratch);
  const auto l2 = BatchGradientParallel<float>(p, c, batch, 3, true, par2, scratch);
  CHECK(par1.flat() == par2.flat());
  CHECK(l1.total == l2.total);
  CHECK(std::abs(ls.total - l1.total) < 1e-5 * std::abs(ls.total));
  const float scale = serial.flat().cwiseAbs().maxCoeff();
  CHECK((serial.flat() - par1.flat()).cwiseAbs().maxCoeff() < 1e-5f * scale);
}

ForwardOutput<double> Blank(int T) {
  ForwardOutput<double> out;
  out.T = T;
  for (std::size_t u = 0; u < kNumUseCases; ++u) {
    out.rd[u] = Mat<double>::Zero(3, T);
    out.rd[u].row(kTagO).setConstant(0.9);
    out.rd[u].row(kTagB).setConstant(0.05);
    out.rd[u].row(kTagI).setConstant(0.05);
    out.del[u] = Mat<double>::Zero(2, T);
    out.del[u].row(kKeep).setConstant(0.8);
    out.del[u].row(kDelete).setConstant(0.2);
    out.rr[u] = Mat<double>::Constant(T, T, 1.0 / T);
  }
  return out;
}

void SetTag(ForwardOutput<double> &out, UseCase u, int t, int tag, double p = 0.8) {
  auto col = out.rd[Index(u)].col(t);
  col.setConstant((1 - p) / 2);
  col(tag) = p;
}

void Point(ForwardOutput<double> &out, UseCase u, int row, int target) {
  auto r = out.rr[Index(u)].row(row);
  r.setConstant(0.01);
  r(target) = 1;
  r /= r.sum();
}

TEST_CASE("decode") {
  const auto &seq = RepairRow();  // How far is San Jose by car [SEP] I meant San Francisco
  const int T = seq.size();
  SUBCASE("all O means no substitutions") {
    const auto prog = Decode(Blank(T), seq);
    CHECK(prog.NumSubstitutions() == 0);
    CHECK(prog.AllDeletions().empty());
  }
  SUBCASE("O B I O with consistent pointers") {
    auto out = Blank(T);
    SetTag(out, UseCase::kRepair, 10, kTagB);
    SetTag(out, UseCase::kRepair, 11, kTagI);
    Point(out, UseCase::kRepair, 10, 3);
    Point(out, UseCase::kRepair, 11, 4);
    for (int t : {7, 8, 9}) out.del[Index(UseCase::kRepair)].col(t) << 0.1, 0.9;
    const auto prog = Decode(out, seq);
    CHECK(prog == fixtures::WorkedExamples()[4].program);
  }
  SUBCASE("start pointer after end pointer drops the substitution") {
    auto out = Blank(T);
    SetTag(out, UseCase::kRepair, 10, kTagB);
    SetTag(out, UseCase::kRepair, 11, kTagI);
    Point(out, UseCase::kRepair, 10, 4);
    Point(out, UseCase::kRepair, 11, 3);
    for (int t : {7, 8, 9}) out.del[Index(UseCase::kRepair)].col(t) << 0.1, 0.9;
    const auto prog = Decode(out, seq);
    CHECK(prog.NumSubstitutions() == 0);
    CHECK(prog[UseCase::kRepair].deletions == std::set<int>{7, 8, 9});
  }
  SUBCASE("orphan I is ignored and the stronger run wins") {
    auto out = Blank(T);
    SetTag(out, UseCase::kRepair, 0, kTagI);
    SetTag(out, UseCase::kRepair, 1, kTagB, 0.6);
    SetTag(out, UseCase::kRepair, 10, kTagB, 0.9);
    SetTag(out, UseCase::kRepair, 11, kTagI, 0.9);
    Point(out, UseCase::kRepair, 10, 3);
    Point(out, UseCase::kRepair, 11, 4);
    const auto prog = Decode(out, seq);
    REQUIRE(prog[UseCase::kRepair].substitution.has_value());
    CHECK(prog[UseCase::kRepair].substitution->replacement == Span{10, 12});
  }
  SUBCASE("pointer into the separator fails validation") {
    auto out = Blank(T);
    SetTag(out, UseCase::kRepair, 10, kTagB);
    SetTag(out, UseCase::kRepair, 11, kTagI);
    Point(out, UseCase::kRepair, 10, 5);
    Point(out, UseCase::kRepair, 11, 8);
    CHECK(Decode(out, seq).NumSubstitutions() == 0);
  }
  SUBCASE("deletions inside a decoded span are dropped") {
    auto out = Blank(T);
    SetTag(out, UseCase::kRepair, 10, kTagB);
    SetTag(out, UseCase::kRepair, 11, kTagI);
    Point(out, UseCase::kRepair, 10, 3);
    Point(out, UseCase::kRepair, 11, 4);
    out.del[Index(UseCase::kIntent)].col(11) << 0.1, 0.9;
    out.del[Index(UseCase::kIntent)].col(6) << 0.1, 0.9;
    const auto prog = Decode(out, seq);
    CHECK(prog[UseCase::kIntent].deletions == std::set<int>{6});
  }
}

TEST_CASE("decoding one-hot gold outputs recovers the gold program") {
  const auto gen = DataGenerator::FromDirectory(QRW_DATA_DIR);
  std::vector<LabeledExample> data = gen.GenerateCompositional(300, 9);
  for (UseCase u : kAllUseCases) {
    const auto part = gen.GenerateSingleTask(u, 200, 9);
    data.insert(data.end(), part.begin(), part.end());
  }
  for (const auto &ex : data) {
    const auto seq = ex.Sequence();
    const auto decoded = Decode(OneHotOutput(MakeLabels(seq, ex.program)), seq);
    CAPTURE(ex.id);
    CHECK(decoded == ex.program);
  }
  for (const auto &row : fixtures::WorkedExamples()) {
    const auto seq = fixtures::Sequence(row);
    CHECK(Decode(OneHotOutput(MakeLabels(seq, row.program)), seq) == row.program);
  }
}

}  // namespace
}  // namespace qrw
