// Copyright 2026 The mmsr Authors. All Rights Reserved.
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

#pragma once

#include <stdexcept>
#include <string>

namespace mmsr {

// Malformed or out-of-range input (bad indices, parse failures, violated
// preconditions). Maps to CLI exit status 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The request is well-formed but exceeds what the library can do, e.g.
// exhaustive robustness checks above the vertex limit. Exit status 3.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative method diverged or failed to converge. Exit status 4.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mmsr
