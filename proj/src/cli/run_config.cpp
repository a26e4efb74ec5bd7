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


#include "qrw/cli/run_config.hpp"

#include <fstream>
#include <sstream>

#include "qrw/errors.hpp"

namespace qrw {

namespace {

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t ParseCount(const std::string &key, const std::string &v) {
  std::size_t pos = 0;
  unsigned long long n = 0;
  try {
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    n = std::stoull(v, &pos);
  } catch (const std::exception &) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) {
    throw InvalidInputError("config key '" + key + "' needs a non-negative integer, got '" +
                            v + "'");
  }
  return static_cast<std::size_t>(n);
}

int ParseInt(const std::string &key, const std::string &v) {
  const auto n = ParseCount(key, v);
  if (n > 1000000000) throw InvalidInputError("config key '" + key + "' is too large");
  return static_cast<int>(n);
}

bool ParseBool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidInputError("config key '" + key + "' needs true or false, got '" + v + "'");
}

}  // namespace

void RunConfig::Set(const std::string &key, const std::string &value) {
  if (key == "data_root") data_root = value;
  else if (key == "data_dir") data_dir = value;
  else if (key == "examples_per_use_case") examples_per_use_case = ParseCount(key, value);
  else if (key == "compositional_examples") compositional_examples = ParseCount(key, value);
  else if (key == "compositional_train_size") compositional_train_size = ParseCount(key, value);
  else if (key == "checkpoint") checkpoint = value;
  else if (key == "eval_sets") {
    if (value != "single" && value != "compositional" && value != "all") {
      throw InvalidInputError("eval_sets must be single, compositional or all");
    }
    eval_sets = value;
  } else if (key == "eval_split") {
    if (value != "TRAIN" && value != "VALID" && value != "TEST") {
      throw InvalidInputError("eval_split must be TRAIN, VALID or TEST");
    }
    eval_split = value;
  } else if (key == "oracle") oracle = ParseBool(key, value);
  else if (key == "sweep_sizes") {
    const auto old = sweep_sizes;
    sweep_sizes = value;
    try {
      (void)SweepSizes();
    } catch (...) {
      sweep_sizes = old;
      throw;
    }
  } else if (key == "bench_warmup") bench_warmup = ParseInt(key, value);
  else if (key == "bench_reps") bench_reps = ParseInt(key, value);
  else if (key == "bench_per_length") bench_per_length = ParseInt(key, value);
  else if (key == "resume") resume = ParseBool(key, value);
  else {
    nlohmann::json v;
    if (key == "embedding_mode" || key == "embedding_path") {
      v = value;
    } else {
      try {
        v = nlohmann::json::parse(value);
      } catch (const nlohmann::json::exception &) {
        v = value;
      }
    }
    try {
      model.Update({{key, v}});
    } catch (const InvalidInputError &e) {
      if (std::string(e.what()).find("unknown model config key") != std::string::npos) {
        throw InvalidInputError("unknown config key '" + key + "'");
      }
      throw;
    }
  }
}

void RunConfig::Apply(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(lineno, "expected 'key = value', got '" + line + "'");
    }
    try {
      Set(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
    } catch (const InvalidInputError &e) {
      throw ParseError(lineno, e.what());
    }
  }
}

RunConfig RunConfig::Load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig c;
  c.Apply(ss.str());
  return c;
}

std::string RunConfig::ToText() const {
  std::ostringstream out;
  out << "data_root = " << data_root << '\n'
      << "data_dir = " << data_dir << '\n'
      << "examples_per_use_case = " << examples_per_use_case << '\n'
      << "compositional_examples = " << compositional_examples << '\n'
      << "compositional_train_size = " << compositional_train_size << '\n'
      << "checkpoint = " << checkpoint << '\n'
      << "eval_sets = " << eval_sets << '\n'
      << "eval_split = " << eval_split << '\n'
      << "oracle = " << (oracle ? "true" : "false") << '\n'
      << "sweep_sizes = " << sweep_sizes << '\n'
      << "bench_warmup = " << bench_warmup << '\n'
      << "bench_reps = " << bench_reps << '\n'
      << "bench_per_length = " << bench_per_length << '\n'
      << "resume = " << (resume ? "true" : "false") << '\n'
      << model.ToText();
  return out.str();
}

std::vector<std::size_t> RunConfig::SweepSizes() const {
  std::vector<std::size_t> sizes;
  std::stringstream ss(sweep_sizes);
  std::string part;
  while (std::getline(ss, part, ',')) sizes.push_back(ParseCount("sweep_sizes", Trim(part)));
  if (sizes.empty()) throw InvalidInputError("sweep_sizes is empty");
  return sizes;
}

}  // namespace qrw
