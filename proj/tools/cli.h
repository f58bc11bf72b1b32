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

#include <ostream>
#include <string>

#include "ncwc/interchange.h"

namespace ncwc::cli {

/// Exit codes.
constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

/// Runs one invocation. Results go to `out`, diagnostics to `err`.
int cliMain(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Aligned text rendering used by `query` and `show`.
std::string formatTable(const RecordBatch& batch);
/// {"columns":[...],"rows":[[...],...]} in canonical JSON.
std::string batchJson(const RecordBatch& batch);

} // namespace ncwc::cli
