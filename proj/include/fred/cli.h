//
// Copyright 2026 The FreD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line front end. Exit codes:
//   0  success
//   2  configuration error (flags, config file, budget)
//   3  data error (unreadable or malformed embeddings / release files)
//   4  protocol failure (an aggregation round did not complete)
// Results go to stdout, diagnostics to stderr.

#ifndef FRED_CLI_H_
#define FRED_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace fred::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitProtocol = 4;

// args[0] is the program name.
int Main(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err);

}  // namespace fred::cli

#endif  // FRED_CLI_H_
