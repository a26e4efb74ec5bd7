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


#include "qrw/templates.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "qrw/errors.hpp"

namespace qrw {

namespace {

std::string Trim(const std::string &s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

Pattern ParsePattern(const std::string &text, bool allow_groups,
                     std::size_t line) {
  Pattern out;
  int depth = 0;
  for (const auto &tok : Tokenize(text)) {
    PatternItem item;
    if (tok.rfind("[", 0) == 0 && tok.size() > 1) {
      // [rep:UC, [rpd:UC, [del:UC
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw ParseError(line, "bad group opener '" + tok + "'");
      const std::string role = tok.substr(1, colon - 1);
      const auto uc = ParseUseCase(tok.substr(colon + 1));
      if (!uc) throw ParseError(line, "unknown use case in '" + tok + "'");
      if (role == "rep") {
        item.role = GroupRole::kReplacement;
      } else if (role == "rpd") {
        item.role = GroupRole::kReplaced;
      } else if (role == "del") {
        item.role = GroupRole::kDelete;
      } else {
        throw ParseError(line, "unknown group role '" + role + "'");
      }
      item.kind = PatternItem::Kind::kOpen;
      item.use_case = *uc;
      ++depth;
    } else if (tok == "]") {
      item.kind = PatternItem::Kind::kClose;
      if (--depth < 0) throw ParseError(line, "unbalanced ']'");
    } else if (tok.size() > 2 && tok.front() == '{' && tok.back() == '}') {
      item.kind = PatternItem::Kind::kSlot;
      const std::string body = tok.substr(1, tok.size() - 2);
      const auto dot = body.find('.');
      item.text = body.substr(0, dot);
      if (dot != std::string::npos) item.form = body.substr(dot + 1);
      if (item.text.empty()) throw ParseError(line, "empty slot name");
    } else {
      if (tok == kSepToken) throw ParseError(line, "literal [SEP] in pattern");
      item.text = tok;
    }
    if (!allow_groups && (item.kind == PatternItem::Kind::kOpen ||
                          item.kind == PatternItem::Kind::kClose)) {
      throw ParseError(line, "groups are not allowed here");
    }
    out.push_back(std::move(item));
  }
  if (depth != 0) throw ParseError(line, "unclosed group");
  return out;
}

void CheckTemplate(const QueryTemplate &t, std::size_t line) {
  if (t.followup.empty()) throw ParseError(line, "template " + t.id + " has no followup");
  if (t.rewrite.empty()) throw ParseError(line, "template " + t.id + " has no rewrite");
  if (t.sep_delete && t.context.empty()) {
    throw ParseError(line, "template " + t.id + " deletes [SEP] without a context");
  }
  if (t.sep_delete && !t.use_cases.count(*t.sep_delete)) {
    throw ParseError(line, "template " + t.id + ": sep use case not declared");
  }
  for (const auto *p : {&t.context, &t.followup}) {
    for (const auto &item : *p) {
      if (item.kind == PatternItem::Kind::kOpen && !t.use_cases.count(item.use_case)) {
        throw ParseError(line, "template " + t.id + " uses undeclared " +
                                   std::string(UseCaseName(item.use_case)));
      }
    }
  }
  if (t.use_cases.size() == 2 && !t.pool) {
    throw ParseError(line, "template " + t.id + ": compositional templates need a pool");
  }
  if (t.use_cases.size() == 1 && t.pool) {
    throw ParseError(line, "template " + t.id + ": single-task templates take no pool");
  }
}

}  // namespace

std::string SlotDomain(const std::string &key) {
  return key.substr(0, key.find('#'));
}

std::vector<std::string> QueryTemplate::SlotKeys() const {
  std::vector<std::string> keys;
  for (const auto *p : {&context, &followup, &rewrite}) {
    for (const auto &item : *p) {
      if (item.kind == PatternItem::Kind::kSlot &&
          std::find(keys.begin(), keys.end(), item.text) == keys.end()) {
        keys.push_back(item.text);
      }
    }
  }
  return keys;
}

std::vector<QueryTemplate> ParseTemplates(std::istream &in) {
  std::vector<QueryTemplate> out;
  std::optional<QueryTemplate> cur;
  std::set<std::string> seen_ids;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = Trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (!cur) {
      const auto words = Tokenize(s);
      if (words.empty() || words[0] != "template") {
        throw ParseError(line, "expected 'template'");
      }
      if (words.size() < 3 || words.size() > 4) {
        throw ParseError(line, "expected 'template <id> <UC[+UC]> [train|eval]'");
      }
      QueryTemplate t;
      t.id = words[1];
      t.line = line;
      if (!seen_ids.insert(t.id).second) throw ParseError(line, "duplicate template id " + t.id);
      std::stringstream ucs(words[2]);
      std::string name;
      while (std::getline(ucs, name, '+')) {
        const auto uc = ParseUseCase(name);
        if (!uc) throw ParseError(line, "unknown use case '" + name + "'");
        if (!t.use_cases.insert(*uc).second) throw ParseError(line, "repeated use case");
      }
      if (t.use_cases.size() > 2) throw ParseError(line, "at most two use cases");
      if (words.size() == 4) {
        if (words[3] == "train") {
          t.pool = Pool::kTrain;
        } else if (words[3] == "eval") {
          t.pool = Pool::kEval;
        } else {
          throw ParseError(line, "pool must be train or eval");
        }
      }
      cur = std::move(t);
      continue;
    }
    if (s == "end") {
      CheckTemplate(*cur, line);
      out.push_back(std::move(*cur));
      cur.reset();
      continue;
    }
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ParseError(line, "expected 'key: value'");
    const std::string key = Trim(s.substr(0, colon));
    const std::string value = Trim(s.substr(colon + 1));
    if (key == "context") {
      cur->context = ParsePattern(value, true, line);
    } else if (key == "followup") {
      cur->followup = ParsePattern(value, true, line);
    } else if (key == "rewrite") {
      cur->rewrite = ParsePattern(value, false, line);
    } else if (key == "sep") {
      const auto words = Tokenize(value);
      if (words.size() != 2 || words[0] != "delete" || !ParseUseCase(words[1])) {
        throw ParseError(line, "expected 'sep: delete <UC>'");
      }
      cur->sep_delete = *ParseUseCase(words[1]);
    } else {
      throw ParseError(line, "unknown key '" + key + "'");
    }
  }
  if (cur) throw ParseError(line, "template " + cur->id + " missing 'end'");
  return out;
}

std::vector<QueryTemplate> LoadTemplates(const std::filesystem::path &path) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(path)) {
    for (const auto &f : std::filesystem::directory_iterator(path)) {
      if (f.path().extension() == ".tpl") files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  std::vector<QueryTemplate> out;
  std::set<std::string> ids;
  for (const auto &f : files) {
    std::ifstream in(f);
    if (!in) throw InvalidInputError("cannot open " + f.string());
    try {
      for (auto &t : ParseTemplates(in)) {
        if (!ids.insert(t.id).second) {
          throw ParseError(t.line, "duplicate template id " + t.id);
        }
        out.push_back(std::move(t));
      }
    } catch (const ParseError &e) {
      throw ParseError(e.line(), f.filename().string() + ": " + e.what());
    }
  }
  return out;
}

namespace {

struct Expander {
  const SlotFilling &filling;
  std::vector<std::string> Slot(const PatternItem &item) const {
    const auto it = filling.find(item.text);
    if (it == filling.end()) throw InvalidInputError("unfilled slot {" + item.text + "}");
    return EntityForm(it->second, item.form);
  }
};

}  // namespace

Instance Instantiate(const QueryTemplate &tpl, const SlotFilling &filling) {
  Expander ex{filling};
  Instance inst;
  std::map<UseCase, std::optional<Span>> rep, rpd;

  auto expand = [&](const Pattern &p, int offset, std::vector<std::string> &out) {
    std::vector<std::pair<const PatternItem *, int>> open;
    for (const auto &item : p) {
      switch (item.kind) {
        case PatternItem::Kind::kWord:
          out.push_back(item.text);
          break;
        case PatternItem::Kind::kSlot:
          for (auto &t : ex.Slot(item)) out.push_back(std::move(t));
          break;
        case PatternItem::Kind::kOpen:
          open.push_back({&item, offset + static_cast<int>(out.size())});
          break;
        case PatternItem::Kind::kClose: {
          const auto [g, start] = open.back();
          open.pop_back();
          const Span span{start, offset + static_cast<int>(out.size())};
          if (span.length() == 0) throw InvalidInputError(tpl.id + ": empty group");
          auto &edits = inst.program[g->use_case];
          if (g->role == GroupRole::kDelete) {
            for (int i = span.start; i < span.end; ++i) edits.deletions.insert(i);
          } else {
            auto &slot = g->role == GroupRole::kReplacement ? rep[g->use_case]
                                                             : rpd[g->use_case];
            if (slot) throw InvalidInputError(tpl.id + ": repeated span group");
            slot = span;
          }
          break;
        }
      }
    }
  };

  expand(tpl.context, 0, inst.context);
  const int followup_offset =
      inst.context.empty() ? 0 : static_cast<int>(inst.context.size()) + 1;
  expand(tpl.followup, followup_offset, inst.followup);
  expand(tpl.rewrite, 0, inst.rewrite);

  for (UseCase u : kAllUseCases) {
    const bool has_rep = rep.count(u) && rep[u];
    const bool has_rpd = rpd.count(u) && rpd[u];
    if (has_rep != has_rpd) {
      throw InvalidInputError(tpl.id + ": replacement and replaced must pair up");
    }
    if (has_rep) inst.program[u].substitution = Substitution{*rep[u], *rpd[u]};
  }
  if (tpl.sep_delete) {
    inst.program[*tpl.sep_delete].deletions.insert(
        static_cast<int>(inst.context.size()));
  }
  return inst;
}

}  // namespace qrw
