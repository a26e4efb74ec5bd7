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


#ifndef QRW_TEMPLATES_HPP_
#define QRW_TEMPLATES_HPP_

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qrw/catalog.hpp"
#include "qrw/edit_engine.hpp"
#include "qrw/use_case.hpp"

namespace qrw {

enum class GroupRole { kReplacement, kReplaced, kDelete };

struct PatternItem {
  enum class Kind { kWord, kSlot, kOpen, kClose };
  Kind kind = Kind::kWord;
  std::string text;  // the word, or the slot key ("person", "city#2")
  std::string form;  // slot form, e.g. "poss"
  GroupRole role = GroupRole::kReplacement;  // kOpen only
  UseCase use_case = UseCase::kIntent;       // kOpen only
};

using Pattern = std::vector<PatternItem>;

// A dialog template with its gold edits marked inline. See
// docs/data_format.md for the file grammar.
struct QueryTemplate {
  std::string id;
  std::set<UseCase> use_cases;
  std::optional<Pool> pool;  // set for compositional templates
  Pattern context;
  Pattern followup;
  Pattern rewrite;
  std::optional<UseCase> sep_delete;
  std::size_t line = 0;

  // Distinct slot keys in order of first appearance.
  std::vector<std::string> SlotKeys() const;
};

// "person#2" -> "person".
std::string SlotDomain(const std::string &key);

// Throws ParseError on malformed input.
std::vector<QueryTemplate> ParseTemplates(std::istream &in);
// A .tpl file, or every .tpl file in a directory (sorted by name).
std::vector<QueryTemplate> LoadTemplates(const std::filesystem::path &path);

using SlotFilling = std::map<std::string, Entity>;

struct Instance {
  std::vector<std::string> context;
  std::vector<std::string> followup;
  std::vector<std::string> rewrite;  // expanded rewrite pattern
  EditProgram program;
};

// Expands the patterns under the filling and reads off the gold program.
// Throws InvalidInputError for a missing slot or an inconsistent group layout.
Instance Instantiate(const QueryTemplate &tpl, const SlotFilling &filling);

}  // namespace qrw

#endif  // QRW_TEMPLATES_HPP_
