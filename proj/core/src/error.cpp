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

#include "ncwc/error.h"

#include <fmt/format.h>

namespace ncwc {

std::string_view errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDupId:
      return "E_DUP_ID";
    case ErrorCode::kIo:
      return "E_IO";
    case ErrorCode::kNoCollection:
      return "E_NO_COLLECTION";
    case ErrorCode::kNoDatabase:
      return "E_NO_DATABASE";
    case ErrorCode::kNullColumn:
      return "E_NULL_COLUMN";
    case ErrorCode::kNullType:
      return "E_NULL_TYPE";
    case ErrorCode::kExists:
      return "E_EXISTS";
    case ErrorCode::kNotEmpty:
      return "E_NOT_EMPTY";
    case ErrorCode::kBadMeta:
      return "E_BAD_META";
    case ErrorCode::kNoTable:
      return "E_NO_TABLE";
    case ErrorCode::kNoBucketSpec:
      return "E_NO_BUCKET_SPEC";
    case ErrorCode::kType:
      return "E_TYPE";
    case ErrorCode::kStaleSplit:
      return "E_STALE_SPLIT";
    case ErrorCode::kSchemaMismatch:
      return "E_SCHEMA_MISMATCH";
    case ErrorCode::kAuth:
      return "E_AUTH";
    case ErrorCode::kParse:
      return "E_PARSE";
    case ErrorCode::kTxnOpen:
      return "E_TXN_OPEN";
    case ErrorCode::kNoTxn:
      return "E_NO_TXN";
    case ErrorCode::kInvalidArgument:
      return "E_INVALID_ARGUMENT";
  }
  return "E_UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(fmt::format("{}: {}", errorCodeName(code), detail)),
      code_(code),
      detail_(detail) {}

void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

} // namespace ncwc
