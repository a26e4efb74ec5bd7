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


#ifndef QRW_EVAL_METRICS_HPP_
#define QRW_EVAL_METRICS_HPP_

#include <span>
#include <string>

namespace qrw {

// Single-space-joined strings compared byte for byte.
bool ExactMatch(std::span<const std::string> pred, std::span<const std::string> gold);

}  // namespace qrw

#endif  // QRW_EVAL_METRICS_HPP_
