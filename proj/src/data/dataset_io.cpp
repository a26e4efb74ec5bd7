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


#include "qrw/dataset_io.hpp"

#include <fstream>

#include "qrw/errors.hpp"

namespace qrw {

namespace {

using nlohmann::json;

const json &Field(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidInputError(std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

Span SpanFromJson(const json &j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer()) {
    throw InvalidInputError("span must be [start, end]");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

std::vector<std::string> TokensFromJson(const json &j, const char *key) {
  const auto &f = Field(j, key);
  if (!f.is_array()) throw InvalidInputError(std::string(key) + " must be an array");
  std::vector<std::string> out;
  for (const auto &t : f) {
    if (!t.is_string()) throw InvalidInputError(std::string(key) + " must hold strings");
    out.push_back(t.get<std::string>());
  }
  return out;
}

}  // namespace

json ProgramToJson(const EditProgram &program) {
  json out = json::object();
  for (const auto &e : program) {
    json entry;
    if (e.substitution) {
      entry["substitution"] = {
          {"replacement", {e.substitution->replacement.start, e.substitution->replacement.end}},
          {"replaced", {e.substitution->replaced.start, e.substitution->replaced.end}}};
    } else {
      entry["substitution"] = nullptr;
    }
    entry["deletions"] = json(std::vector<int>(e.deletions.begin(), e.deletions.end()));
    out[std::string(UseCaseName(e.use_case))] = std::move(entry);
  }
  return out;
}

EditProgram ProgramFromJson(const json &j) {
  if (!j.is_object()) throw InvalidInputError("program must be an object");
  EditProgram program;
  for (const auto &[key, entry] : j.items()) {
    const auto uc = ParseUseCase(key);
    if (!uc) throw InvalidInputError("unknown use case \"" + key + "\"");
    auto &edits = program[*uc];
    if (entry.contains("substitution") && !entry["substitution"].is_null()) {
      const auto &s = entry["substitution"];
      edits.substitution = Substitution{SpanFromJson(Field(s, "replacement")),
                                        SpanFromJson(Field(s, "replaced"))};
    }
    if (entry.contains("deletions")) {
      for (const auto &d : entry["deletions"]) {
        if (!d.is_number_integer()) throw InvalidInputError("deletion must be an integer");
        edits.deletions.insert(d.get<int>());
      }
    }
  }
  return program;
}

json ExampleToJson(const LabeledExample &ex) {
  json uc = json::array();
  for (UseCase u : ex.use_cases) uc.push_back(std::string(UseCaseName(u)));
  return {{"id", ex.id},
          {"template", ex.template_id},
          {"use_cases", uc},
          {"context", ex.context},
          {"followup", ex.followup},
          {"rewrite", ex.rewrite},
          {"split", std::string(SplitName(ex.split))},
          {"program", ProgramToJson(ex.program)}};
}

LabeledExample ExampleFromJson(const json &j) {
  LabeledExample ex;
  const auto &id = Field(j, "id");
  if (!id.is_string()) throw InvalidInputError("id must be a string");
  ex.id = id.get<std::string>();
  if (j.contains("template")) ex.template_id = j["template"].get<std::string>();
  for (const auto &u : Field(j, "use_cases")) {
    const auto uc = u.is_string() ? ParseUseCase(u.get<std::string>()) : std::nullopt;
    if (!uc) throw InvalidInputError("bad use case in use_cases");
    ex.use_cases.insert(*uc);
  }
  ex.context = TokensFromJson(j, "context");
  ex.followup = TokensFromJson(j, "followup");
  ex.rewrite = TokensFromJson(j, "rewrite");
  const auto &split = Field(j, "split");
  const auto s = split.is_string() ? ParseSplit(split.get<std::string>()) : std::nullopt;
  if (!s) throw InvalidInputError("bad split");
  ex.split = *s;
  ex.program = ProgramFromJson(Field(j, "program"));
  return ex;
}

void WriteDataset(std::ostream &out, const std::vector<LabeledExample> &examples) {
  for (const auto &ex : examples) out << ExampleToJson(ex).dump() << '\n';
}

void WriteDataset(const std::filesystem::path &path,
                  const std::vector<LabeledExample> &examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write " + path.string());
  WriteDataset(out, examples);
  if (!out) throw InvalidInputError("write failed for " + path.string());
}

std::vector<LabeledExample> ReadDataset(std::istream &in) {
  std::vector<LabeledExample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ExampleFromJson(json::parse(line)));
    } catch (const json::exception &e) {
      throw ParseError(lineno, e.what());
    } catch (const InvalidInputError &e) {
      throw ParseError(lineno, e.what());
    }
  }
  return out;
}

std::vector<LabeledExample> ReadDataset(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open " + path.string());
  return ReadDataset(in);
}

}  // namespace qrw
