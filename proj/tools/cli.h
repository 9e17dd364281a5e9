//
// Copyright 2026 The dproute Authors
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

#ifndef DPROUTE_TOOLS_CLI_H_
#define DPROUTE_TOOLS_CLI_H_

#include <ostream>

namespace dproute {

// Entry point of the dproute command-line tool. Returns 0 on success, 1 on
// bad usage or input, 2 when a solver fails to converge.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dproute

#endif  // DPROUTE_TOOLS_CLI_H_
