// Copyright (c) 2026 The Phonodec Authors. All Rights Reserved.
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

#ifndef PHONODEC_TOOLS_CLI_H_
#define PHONODEC_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace phonodec::cli {

// Runs one subcommand. Exit codes: 0 success, 1 usage error, 2 data or
// format error, 3 numeric failure.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Inserts "--key=value" arguments read from the JSON object named by the
// subcommand's --config option. Keys already given on the command line are
// skipped so explicit flags win.
std::vector<std::string> ExpandConfig(const std::vector<std::string>& args);

}  // namespace phonodec::cli

#endif  // PHONODEC_TOOLS_CLI_H_
