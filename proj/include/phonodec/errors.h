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

#ifndef PHONODEC_ERRORS_H_
#define PHONODEC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace phonodec {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, corpora, sequences).
class DataError : public Error {
 public:
  using Error::Error;
};

// Caller supplied an invalid argument or configuration value.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A computation produced a non-finite value or became unstable.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace phonodec

#endif  // PHONODEC_ERRORS_H_
