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


#include "qrw/catalog.hpp"

#include <algorithm>
#include <fstream>

#include "qrw/edit_engine.hpp"
#include "qrw/errors.hpp"

namespace qrw {

namespace {

std::vector<std::string> CheckedTokens(const std::string &text,
                                       const std::string &where) {
  auto tokens = Tokenize(text);
  if (tokens.empty()) throw InvalidInputError(where + ": empty entry");
  for (const auto &t : tokens) {
    if (t == kSepToken) throw InvalidInputError(where + ": entry contains [SEP]");
  }
  return tokens;
}

template <typename Fn>
void ForEachEntry(const std::filesystem::path &file, Fn fn) {
  std::ifstream in(file);
  if (!in) throw InvalidInputError("cannot open " + file.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    fn(line, file.string() + ":" + std::to_string(lineno));
  }
}

}  // namespace

std::vector<std::string> EntityForm(const Entity &e, const std::string &form) {
  if (form.empty()) return e.tokens;
  if (form == "poss") {
    auto out = e.tokens;
    auto &last = out.back();
    last += (last.back() == 's') ? "'" : "'s";
    return out;
  }
  if (e.gender == Gender::kNone) {
    throw InvalidInputError("pronoun form '" + form + "' needs a gendered entity");
  }
  const bool male = e.gender == Gender::kMale;
  if (form == "subj") return {male ? "he" : "she"};
  if (form == "obj") return {male ? "him" : "her"};
  if (form == "pposs") return {male ? "his" : "her"};
  throw InvalidInputError("unknown slot form '" + form + "'");
}

Catalogs Catalogs::Load(const std::filesystem::path &root) {
  Catalogs c;
  for (const auto &[pool, dir] : {std::pair{Pool::kTrain, "train"},
                                  std::pair{Pool::kEval, "eval"}}) {
    const auto pool_dir = root / "catalogs" / dir;
    if (!std::filesystem::is_directory(pool_dir)) {
      throw InvalidInputError("missing catalog directory " + pool_dir.string());
    }
    for (const auto &f : std::filesystem::directory_iterator(pool_dir)) {
      if (f.path().extension() != ".txt") continue;
      const std::string domain = f.path().stem().string();
      ForEachEntry(f.path(), [&](const std::string &line, const std::string &where) {
        Entity e;
        std::string surface = line;
        const auto bar = line.find('|');
        if (bar != std::string::npos) {
          surface = line.substr(0, bar);
          const auto g = Tokenize(line.substr(bar + 1));
          if (g.size() != 1 || (g[0] != "m" && g[0] != "f")) {
            throw InvalidInputError(where + ": gender must be m or f");
          }
          e.gender = g[0] == "m" ? Gender::kMale : Gender::kFemale;
        }
        e.tokens = CheckedTokens(surface, where);
        c.AddEntity(domain, pool, std::move(e));
      });
    }
  }
  const auto lex_dir = root / "lexicons";
  if (!std::filesystem::is_directory(lex_dir)) {
    throw InvalidInputError("missing lexicon directory " + lex_dir.string());
  }
  for (const auto &f : std::filesystem::directory_iterator(lex_dir)) {
    if (f.path().extension() != ".txt") continue;
    const std::string name = f.path().stem().string();
    ForEachEntry(f.path(), [&](const std::string &line, const std::string &where) {
      c.AddLexiconEntry(name, CheckedTokens(line, where));
    });
  }
  // directory_iterator order is unspecified; keep entry order stable.
  for (auto *m : {&c.train_, &c.eval_, &c.all_}) {
    for (auto &[_, cat] : *m) {
      std::stable_sort(cat.entities.begin(), cat.entities.end(),
                       [](const Entity &a, const Entity &b) { return a.tokens < b.tokens; });
    }
  }
  for (auto &[_, lex] : c.lexicons_) std::sort(lex.begin(), lex.end());
  return c;
}

void Catalogs::AddEntity(const std::string &domain, Pool pool, Entity e) {
  auto &m = pool == Pool::kTrain ? train_ : eval_;
  m[domain].domain = domain;
  m[domain].entities.push_back(e);
  all_[domain].domain = domain;
  all_[domain].entities.push_back(std::move(e));
}

void Catalogs::AddLexiconEntry(const std::string &name,
                               std::vector<std::string> e) {
  lexicons_[name].push_back(std::move(e));
}

const std::vector<Entity> &Catalogs::Entities(const std::string &domain,
                                              Pool pool) const {
  const auto &m = pool == Pool::kTrain ? train_ : eval_;
  const auto it = m.find(domain);
  if (it == m.end()) throw InvalidInputError("no catalog for domain '" + domain + "'");
  return it->second.entities;
}

const std::vector<Entity> &Catalogs::AllEntities(const std::string &domain) const {
  const auto it = all_.find(domain);
  if (it == all_.end()) throw InvalidInputError("no catalog for domain '" + domain + "'");
  return it->second.entities;
}

const std::vector<std::vector<std::string>> &Catalogs::Lexicon(
    const std::string &name) const {
  const auto it = lexicons_.find(name);
  if (it == lexicons_.end()) throw InvalidInputError("no lexicon '" + name + "'");
  return it->second;
}

bool Catalogs::HasDomain(const std::string &domain) const {
  return all_.count(domain) > 0;
}

bool Catalogs::HasLexicon(const std::string &name) const {
  return lexicons_.count(name) > 0;
}

std::size_t Catalogs::NumEntities() const {
  std::size_t n = 0;
  for (const auto &[_, cat] : all_) n += cat.entities.size();
  return n;
}

}  // namespace qrw
