// Copyright 2026 The BQM Authors
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

namespace bqm {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Operand dimensions do not agree.
class ShapeError : public Error {
   public:
    using Error::Error;
};

// A documented precondition was violated by the caller.
class ContractError : public Error {
   public:
    using Error::Error;
};

// A numerical routine failed to produce a trustworthy result.
class NumericError : public Error {
   public:
    using Error::Error;
};

// Malformed configuration text. Carries a 1-based line and column.
class ParseError : public Error {
   public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

   private:
    std::size_t line_;
    std::size_t column_;
};

// Well-formed configuration that violates a semantic rule.
class ValidationError : public Error {
   public:
    ValidationError(const std::string& field, const std::string& reason)
        : Error(field + ": " + reason), field_(field) {}

    const std::string& field() const noexcept { return field_; }

   private:
    std::string field_;
};

class IoError : public Error {
   public:
    IoError(const std::string& path, const std::string& reason)
        : Error(path + ": " + reason), path_(path) {}

    const std::string& path() const noexcept { return path_; }

   private:
    std::string path_;
};

}  // namespace bqm
