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


#ifndef QRW_PROGRAM_SEARCH_HPP_
#define QRW_PROGRAM_SEARCH_HPP_

#include <optional>
#include <set>
#include <span>
#include <string>

#include "qrw/edit_engine.hpp"

namespace qrw {

inline constexpr int kMaxSearchLength = 24;

// Exhaustive search for a program that rewrites seq into target using
// substitutions owned by the given use cases (at most one each) plus
// deletions. Candidates with fewer substitutions are tried first and, for a
// fixed set of substitutions, the deletion set is the smallest that works.
// Deletions are attributed to the first active use case, so an empty active
// set only admits the empty program.
//
// Returns std::nullopt when the target is unreachable. Throws
// BoundExceededError when seq.size() > kMaxSearchLength.
std::optional<EditProgram> DeriveProgramBruteForce(
    const TokenSequence &seq, std::span<const std::string> target,
    const std::set<UseCase> &active_use_cases);

}  // namespace qrw

#endif  // QRW_PROGRAM_SEARCH_HPP_
