// Copyright 2026 The bobsearch Authors.
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

#ifndef BOBSEARCH_ERROR_HPP_
#define BOBSEARCH_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace bob {

/// Failure categories surfaced by every module. The C API maps these 1:1 onto
/// bob_status values.
enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kSchema,
  kDuplicateId,
  kValue,
  kEmptyCatalog,
  kEmptyImage,
  kEmptyInput,
  kDimension,
  kMissingSlide,
  kFormat,
  kCorruptIndex,
  kNotFound,
  kDivision,
  kUndefinedCorrelation,
  kDegenerateSequence,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace bob

#endif  // BOBSEARCH_ERROR_HPP_
