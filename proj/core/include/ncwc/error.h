/*
 * Copyright (c) The NCWC Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ncwc {

enum class ErrorCode {
  kDupId,
  kIo,
  kNoCollection,
  kNoDatabase,
  kNullColumn,
  kNullType,
  kExists,
  kNotEmpty,
  kBadMeta,
  kNoTable,
  kNoBucketSpec,
  kType,
  kStaleSplit,
  kSchemaMismatch,
  kAuth,
  kParse,
  kTxnOpen,
  kNoTxn,
  kInvalidArgument,
};

/// Stable identifier used in messages and CLI output, e.g. "E_NO_TABLE".
std::string_view errorCodeName(ErrorCode code);

/// Every domain failure in the library is reported through this type. The
/// message always starts with the code name so that callers printing what()
/// expose the code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept {
    return code_;
  }

  const std::string& detail() const noexcept {
    return detail_;
  }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& detail);

} // namespace ncwc
