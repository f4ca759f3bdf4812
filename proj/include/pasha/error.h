/*
 * Copyright 2026 The pasha Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PASHA_ERROR_H_
#define PASHA_ERROR_H_

#include <stdexcept>
#include <string>

namespace pasha {

// Malformed or inconsistent input data (benchmark files, traces, curves too
// short for the requested resource). Maps to CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A broken internal invariant (ladder corruption, duplicate report, ...).
// Maps to CLI exit code 3.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

// Invalid parameters supplied by the caller use std::invalid_argument.

}  // namespace pasha

#endif  // PASHA_ERROR_H_
