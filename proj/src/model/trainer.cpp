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


#include "qrw/model/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "qrw/errors.hpp"
#include "qrw/model/checkpoint.hpp"
#include "qrw/model/kernels.hpp"

namespace qrw {

nlohmann::json EpochRecord::ToJson() const {
  return {{"epoch", epoch},
          {"L_RD", loss.rd},
          {"L_RR", loss.rr},
          {"L_Del", loss.del},
          {"L", loss.total},
          {"valid_exact_match", valid_exact_match}};
}

EpochRecord EpochRecord::FromJson(const nlohmann::json &j) {
  EpochRecord r;
  try {
    r.epoch = j.at("epoch");
    r.loss.rd = j.at("L_RD");
    r.loss.rr = j.at("L_RR");
    r.loss.del = j.at("L_Del");
    r.loss.total = j.at("L");
    r.valid_exact_match = j.at("valid_exact_match");
    r.seconds = j.value("seconds", 0.0);
  } catch (const nlohmann::json::exception &e) {
    throw InvalidInputError(std::string("malformed training log record: ") + e.what());
  }
  return r;
}

double ExactMatch(const Model &model, std::span<const LabeledExample> examples,
                  bool parallel) {
  if (examples.empty()) return 0;
  std::vector<TokenSequence> inputs;
  inputs.reserve(examples.size());
  for (const auto &ex : examples) inputs.push_back(ex.Sequence());
  const auto preds = PredictRewrites(model, inputs, parallel);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (preds[i].result && preds[i].result->tokens == examples[i].rewrite) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(examples.size());
}

namespace {

struct AdamState {
  Vec<float> m, v;
  std::uint64_t step = 0;
};

void AdamUpdate(const ModelConfig &c, const Vec<float> &grad, AdamState &st,
                Vec<float> &params) {
  ++st.step;
  const float b1 = static_cast<float>(c.adam_beta1);
  const float b2 = static_cast<float>(c.adam_beta2);
  const double t = static_cast<double>(st.step);
  const float bc1 = static_cast<float>(1.0 - std::pow(c.adam_beta1, t));
  const float bc2 = static_cast<float>(1.0 - std::pow(c.adam_beta2, t));
  const float lr = static_cast<float>(c.learning_rate);
  const float eps = static_cast<float>(c.adam_epsilon);
  st.m = b1 * st.m + (1 - b1) * grad;
  st.v = b2 * st.v + (1 - b2) * grad.cwiseAbs2();
  params.array() -= lr * (st.m.array() / bc1) / ((st.v.array() / bc2).sqrt() + eps);
}

// Everything needed to continue a run bit-for-bit.
struct RunState {
  int epochs_done = 0;
  int best_epoch = 0;
  double best_em = -1;
  int bad_epochs = 0;
  AdamState adam;
  std::vector<EpochRecord> log;
};

constexpr char kStateMagic[8] = {'Q', 'R', 'W', 'S', 'T', 'A', 'T', 'E'};
constexpr std::uint32_t kStateVersion = 1;

void PutU64(std::ostream &out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint64_t GetU64(std::istream &in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char *>(b), 8)) throw CheckpointError("training state truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void PutBlob(std::ostream &out, const std::string &s) {
  PutU64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string GetBlob(std::istream &in) {
  const auto n = GetU64(in);
  std::string s(n, '\0');
  if (!in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw CheckpointError("training state truncated");
  }
  return s;
}

void PutFloats(std::ostream &out, const Vec<float> &x) {
  PutU64(out, static_cast<std::uint64_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, &x[i], 4);
    PutU64(out, bits);
  }
}

Vec<float> GetFloats(std::istream &in, std::size_t expected) {
  const auto n = GetU64(in);
  if (n != expected) throw CheckpointError("optimizer state size mismatch");
  Vec<float> x(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto bits = static_cast<std::uint32_t>(GetU64(in));
    std::memcpy(&x[i], &bits, 4);
  }
  return x;
}

std::uint64_t DoubleBits(double d) {
  std::uint64_t b;
  std::memcpy(&b, &d, 8);
  return b;
}

double BitsDouble(std::uint64_t b) {
  double d;
  std::memcpy(&d, &b, 8);
  return d;
}

void SaveState(const std::filesystem::path &path, const RunState &st, const Model &last,
               const Model &best) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw CheckpointError("cannot write " + tmp);
    out.write(kStateMagic, sizeof(kStateMagic));
    PutU64(out, kStateVersion);
    PutU64(out, static_cast<std::uint64_t>(st.epochs_done));
    PutU64(out, static_cast<std::uint64_t>(st.best_epoch));
    PutU64(out, DoubleBits(st.best_em));
    PutU64(out, static_cast<std::uint64_t>(st.bad_epochs));
    PutU64(out, st.adam.step);
    PutFloats(out, st.adam.m);
    PutFloats(out, st.adam.v);
    PutBlob(out, SerializeCheckpoint(last));
    PutBlob(out, SerializeCheckpoint(best));
    nlohmann::json log = nlohmann::json::array();
    for (const auto &r : st.log) {
      auto j = r.ToJson();
      j["seconds"] = r.seconds;
      log.push_back(j);
    }
    PutBlob(out, log.dump());
    if (!out) throw CheckpointError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void LoadState(const std::filesystem::path &path, const ModelConfig &config,
               RunState &st, Model &last, Model &best) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open training state " + path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kStateMagic, 8) != 0) {
    throw CheckpointError("not a training state file (bad magic)");
  }
  if (GetU64(in) != kStateVersion) throw CheckpointError("unsupported training state version");
  st.epochs_done = static_cast<int>(GetU64(in));
  st.best_epoch = static_cast<int>(GetU64(in));
  st.best_em = BitsDouble(GetU64(in));
  st.bad_epochs = static_cast<int>(GetU64(in));
  st.adam.step = GetU64(in);
  // Sizes are checked against the checkpoint read below.
  const auto m_pos = in.tellg();
  const auto m_n = GetU64(in);
  in.seekg(m_pos);
  st.adam.m = GetFloats(in, m_n);
  st.adam.v = GetFloats(in, m_n);
  last = DeserializeCheckpoint(GetBlob(in));
  best = DeserializeCheckpoint(GetBlob(in));
  if (last.params.flat().size() != static_cast<Eigen::Index>(m_n)) {
    throw CheckpointError("optimizer state does not match checkpoint");
  }
  // The stopping rule may change between runs; nothing else may.
  auto schedule_free = [](ModelConfig c) {
    c.max_epochs = 1;
    c.patience = 1;
    return c;
  };
  if (!(schedule_free(last.config) == schedule_free(config))) {
    throw CheckpointError("training state was written with a different config");
  }
  last.config = config;
  best.config = config;
  st.log.clear();
  for (const auto &j : nlohmann::json::parse(GetBlob(in))) {
    st.log.push_back(EpochRecord::FromJson(j));
  }
}

bool Finite(const LossBreakdown &l) {
  return std::isfinite(l.rd) && std::isfinite(l.rr) && std::isfinite(l.del) &&
         std::isfinite(l.total);
}

}  // namespace

TrainResult Train(std::span<const LabeledExample> train,
                  std::span<const LabeledExample> valid, const ModelConfig &config,
                  const TrainOptions &options) {
  if (train.empty()) throw InvalidInputError("training set is empty");
  config.Validate();
  const auto selection = valid.empty() ? train : valid;

  RunState st;
  Model model, best;
  if (options.resume) {
    if (options.state_path.empty()) throw InvalidInputError("resume needs a state path");
    LoadState(options.state_path, config, st, model, best);
  } else {
    if (options.initial) {
      if (options.initial->config.ToText() != config.ToText()) {
        throw InvalidInputError("initial model was built with a different config");
      }
      model = *options.initial;
    } else {
      model = Model::Create(config, Vocabulary::Build(train));
    }
    best = model;
    st.adam.m = Vec<float>::Zero(model.params.flat().size());
    st.adam.v = Vec<float>::Zero(model.params.flat().size());
  }

  const auto prepared = PrepareExamples(train, model.vocab);
  std::vector<std::size_t> order(prepared.size());
  ParamSet<float> grad(model.params.layout_ptr());
  std::vector<ParamSet<float>> scratch;
  std::vector<const TrainingExample *> batch;

  const bool stopped = st.epochs_done > 0 &&
                       (st.bad_epochs >= config.patience ||
                        (options.target_exact_match && st.best_em >= *options.target_exact_match));
  for (int epoch = st.epochs_done + 1; epoch <= config.max_epochs && !stopped; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng(ExampleSeed(config.seed, 1, static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    LossBreakdown sum;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(&prepared[order[i]]);
      const std::uint64_t dropout_seed = ExampleSeed(config.seed, 2, st.adam.step);
      const auto loss =
          options.parallel
              ? BatchGradientParallel<float>(model.params, config, batch, dropout_seed, true,
                                             grad, scratch)
              : BatchGradientSerial<float>(model.params, config, batch, dropout_seed, true,
                                           grad);
      if (!Finite(loss) || !grad.flat().allFinite()) {
        throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                              std::to_string(st.adam.step + 1));
      }
      sum += loss.Scaled(static_cast<double>(batch.size()));
      AdamUpdate(config, grad.flat(), st.adam, model.params.flat());
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = sum.Scaled(1.0 / static_cast<double>(prepared.size()));
    rec.valid_exact_match = ExactMatch(model, selection, options.parallel);
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    st.log.push_back(rec);
    st.epochs_done = epoch;
    if (rec.valid_exact_match > st.best_em) {
      st.best_em = rec.valid_exact_match;
      st.best_epoch = epoch;
      st.bad_epochs = 0;
      best = model;
    } else {
      ++st.bad_epochs;
    }
    if (!options.state_path.empty()) SaveState(options.state_path, st, model, best);
    if (options.on_epoch) options.on_epoch(rec);
    if (st.bad_epochs >= config.patience) break;
    if (options.target_exact_match && st.best_em >= *options.target_exact_match) break;
  }

  TrainResult result{std::move(best), std::move(model), std::move(st.log), st.best_epoch,
                     std::max(st.best_em, 0.0)};
  return result;
}

}  // namespace qrw
