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


#ifndef QRW_CLI_COMMANDS_HPP_
#define QRW_CLI_COMMANDS_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace qrw {

// Parses `args` (without the program name) and runs one subcommand. Returns
// the process exit code; errors are reported on `err`.
int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace qrw

#endif  // QRW_CLI_COMMANDS_HPP_
