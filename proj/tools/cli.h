// Copyright 2026 The AnonRAG Authors
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

#ifndef ANONRAG_TOOLS_CLI_H_
#define ANONRAG_TOOLS_CLI_H_

namespace anonrag::cli {

int AnonragMain(int argc, char** argv);
int AnonMain(int argc, char** argv);

}  // namespace anonrag::cli

#endif  // ANONRAG_TOOLS_CLI_H_
