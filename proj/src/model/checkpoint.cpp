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


#include "qrw/model/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "qrw/errors.hpp"

namespace qrw {

namespace {

constexpr char kMagic[8] = {'Q', 'R', 'W', 'C', 'K', 'P', 'T', '\0'};

void PutU32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutString(std::string &out, const std::string &s) {
  PutU32(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

class Reader {
 public:
  explicit Reader(const std::string &bytes) : bytes_(bytes) {}

  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::string String() {
    const auto n = U32();
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string Raw(std::size_t n) {
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw CheckpointError("checkpoint truncated");
  }
  const std::string &bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string SerializeCheckpoint(const Model &model) {
  std::string out(kMagic, sizeof(kMagic));
  PutU32(out, kCheckpointVersion);
  PutString(out, model.config.ToText());
  PutU32(out, static_cast<std::uint32_t>(model.vocab.size()));
  for (const auto &t : model.vocab.tokens()) PutString(out, t);
  const auto &layout = model.params.layout();
  PutU32(out, static_cast<std::uint32_t>(layout.specs().size()));
  for (std::size_t i = 0; i < layout.specs().size(); ++i) {
    const auto &s = layout.spec(static_cast<int>(i));
    PutString(out, s.name);
    PutU32(out, static_cast<std::uint32_t>(s.rows));
    PutU32(out, static_cast<std::uint32_t>(s.cols));
    const float *data = model.params.flat().data() + s.offset;
    for (std::size_t k = 0; k < s.size(); ++k) {
      std::uint32_t bits;
      std::memcpy(&bits, data + k, sizeof(bits));
      PutU32(out, bits);
    }
  }
  return out;
}

Model DeserializeCheckpoint(const std::string &bytes) {
  Reader r(bytes);
  if (r.Raw(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw CheckpointError("not a checkpoint (bad magic)");
  }
  const auto version = r.U32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  Model m;
  try {
    m.config = ModelConfig::FromText(r.String());
    m.config.Validate();
    std::vector<std::string> tokens(r.U32());
    for (auto &t : tokens) t = r.String();
    m.vocab = Vocabulary::FromTokens(std::move(tokens));
  } catch (const InvalidInputError &e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  }
  m.params = ParamSet<float>(std::make_shared<ParamLayout>(m.config, m.vocab.size()));
  const auto &layout = m.params.layout();
  const auto count = r.U32();
  if (count != layout.specs().size()) throw CheckpointError("tensor count mismatch");
  for (std::size_t i = 0; i < count; ++i) {
    const auto &s = layout.spec(static_cast<int>(i));
    const auto name = r.String();
    const auto rows = r.U32();
    const auto cols = r.U32();
    if (name != s.name || rows != static_cast<std::uint32_t>(s.rows) ||
        cols != static_cast<std::uint32_t>(s.cols)) {
      throw CheckpointError("tensor '" + name + "' does not match expected '" + s.name +
                            "' " + std::to_string(s.rows) + "x" + std::to_string(s.cols));
    }
    float *data = m.params.flat().data() + s.offset;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const std::uint32_t bits = r.U32();
      std::memcpy(data + k, &bits, sizeof(bits));
    }
  }
  if (!r.done()) throw CheckpointError("trailing bytes after checkpoint");
  return m;
}

void SaveCheckpoint(const Model &model, const std::filesystem::path &path) {
  const auto bytes = SerializeCheckpoint(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("write failed for " + path.string());
}

Model LoadCheckpoint(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return DeserializeCheckpoint(ss.str());
}

}  // namespace qrw
