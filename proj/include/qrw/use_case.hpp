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


#ifndef QRW_USE_CASE_HPP_
#define QRW_USE_CASE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace qrw {

// The five conversational use cases. The enumerator order is the canonical
// order used for tie-breaking and for head indexing in the model.
enum class UseCase : std::uint8_t {
  kIntent = 0,
  kEntity = 1,
  kRepair = 2,
  kDisfluency = 3,
  kSteering = 4,
};

inline constexpr std::size_t kNumUseCases = 5;

inline constexpr std::array<UseCase, kNumUseCases> kAllUseCases = {
    UseCase::kIntent, UseCase::kEntity, UseCase::kRepair,
    UseCase::kDisfluency, UseCase::kSteering};

constexpr std::size_t Index(UseCase u) { return static_cast<std::size_t>(u); }

// "INTENT", "ENTITY", "REPAIR", "DISFLUENCY", "STEERING".
std::string_view UseCaseName(UseCase u);

std::optional<UseCase> ParseUseCase(std::string_view name);

}  // namespace qrw

#endif  // QRW_USE_CASE_HPP_
