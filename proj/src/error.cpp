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

#include "bobsearch/error.hpp"

namespace bob {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kIo:
      return "IoError";
    case ErrorCode::kSchema:
      return "SchemaError";
    case ErrorCode::kDuplicateId:
      return "DuplicateId";
    case ErrorCode::kValue:
      return "ValueError";
    case ErrorCode::kEmptyCatalog:
      return "EmptyCatalog";
    case ErrorCode::kEmptyImage:
      return "EmptyImage";
    case ErrorCode::kEmptyInput:
      return "EmptyInput";
    case ErrorCode::kDimension:
      return "DimensionError";
    case ErrorCode::kMissingSlide:
      return "MissingSlide";
    case ErrorCode::kFormat:
      return "FormatError";
    case ErrorCode::kCorruptIndex:
      return "CorruptIndex";
    case ErrorCode::kNotFound:
      return "NotFound";
    case ErrorCode::kDivision:
      return "DivisionError";
    case ErrorCode::kUndefinedCorrelation:
      return "UndefinedCorrelation";
    case ErrorCode::kDegenerateSequence:
      return "DegenerateSequence";
  }
  return "Unknown";
}

}  // namespace bob
