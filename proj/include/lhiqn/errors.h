// Copyright 2026 The LH-IQN Authors
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

#ifndef LHIQN_ERRORS_H_
#define LHIQN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace lhiqn {

// Invalid static configuration: shapes that do not compose, infeasible
// layouts, malformed config files. Raised before any training starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an API contract (e.g. recording into a closed episode).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Non-finite values showed up in a forward/backward pass or optimizer step.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation not defined for this agent variant (e.g. TDL on a DQN learner).
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed input file (CSV schema mismatch, bad checkpoint).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lhiqn

#endif  // LHIQN_ERRORS_H_
