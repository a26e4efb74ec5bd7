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


#include "qrw/use_case.hpp"

namespace qrw {

namespace {
constexpr std::array<std::string_view, kNumUseCases> kNames = {
    "INTENT", "ENTITY", "REPAIR", "DISFLUENCY", "STEERING"};
}  // namespace

std::string_view UseCaseName(UseCase u) { return kNames[Index(u)]; }

std::optional<UseCase> ParseUseCase(std::string_view name) {
  for (UseCase u : kAllUseCases) {
    if (kNames[Index(u)] == name) return u;
  }
  return std::nullopt;
}

}  // namespace qrw
