// Copyright 2026 The offsetnav Authors
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

namespace offsetnav {

// All library failures derive from Error so callers can catch one type and
// still dispatch on the concrete kind (the CLI maps kinds to exit codes).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

// Numerical failures (exit code 2 in the CLI).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonFiniteObjective : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotConverged : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularTemporalBlock : public NumericalError {
 public:
  SingularTemporalBlock(int block, const std::string& what)
      : NumericalError(what), block_(block) {}
  int block() const { return block_; }

 private:
  int block_;
};

class InvalidProfile : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class TooShort : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace offsetnav
