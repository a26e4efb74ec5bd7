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


#ifndef QRW_CATALOG_HPP_
#define QRW_CATALOG_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace qrw {

enum class Gender { kNone, kMale, kFemale };

struct Entity {
  std::vector<std::string> tokens;
  Gender gender = Gender::kNone;
};

// Slot forms of an entity: "" (surface), "poss", "subj", "obj", "pposs".
// Pronoun forms need a gendered entity; throws InvalidInputError otherwise.
std::vector<std::string> EntityForm(const Entity &e, const std::string &form);

struct EntityCatalog {
  std::string domain;
  std::vector<Entity> entities;
};

enum class Pool { kTrain, kEval };

// Entity catalogs for both pools plus phrase lexicons, loaded from
//   <root>/catalogs/{train,eval}/<domain>.txt
//   <root>/lexicons/<name>.txt
// Lines are '#'-comments, blanks, or one entry. person entries carry a
// "|m" or "|f" gender suffix.
class Catalogs {
 public:
  static Catalogs Load(const std::filesystem::path &root);

  // Pool-restricted entity list, or the union of both pools.
  const std::vector<Entity> &Entities(const std::string &domain,
                                      Pool pool) const;
  const std::vector<Entity> &AllEntities(const std::string &domain) const;
  const std::vector<std::vector<std::string>> &Lexicon(
      const std::string &name) const;

  bool HasDomain(const std::string &domain) const;
  bool HasLexicon(const std::string &name) const;
  std::size_t NumEntities() const;

  void AddEntity(const std::string &domain, Pool pool, Entity e);
  void AddLexiconEntry(const std::string &name, std::vector<std::string> e);

 private:
  std::map<std::string, EntityCatalog> train_, eval_, all_;
  std::map<std::string, std::vector<std::vector<std::string>>> lexicons_;
};

}  // namespace qrw

#endif  // QRW_CATALOG_HPP_
