// Copyright 2026 The slsa-audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slsa {

enum class ErrorKind {
  kRange,
  kEmptyInput,
  kNotFound,
  kParse,
  kIo,
  kAuth,
  kRateLimit,
  kNetwork,
  kUnsupportedFormat,
  kUnsupportedExtension,
  kExtraction,
  kSecurity,
  kBomb,
  kIncompleteCommand,
  kFormat,
  kVersion,
  kConsistency,
  kConfig,
};

std::string_view to_string(ErrorKind kind);

// Every operational failure in the library is reported as an Error carrying a
// kind, so the CLI can map them onto exit code 2 and tests can assert on the
// category rather than the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse failures keep the 1-based line (and column when known).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column = 0)
      : Error(ErrorKind::kParse, message), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace slsa
