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

#include <string_view>

namespace ncwc {

/// Write-conflict policy shared by warehouse writes, staged loads and session
/// saves.
enum class SaveMode {
  kErrorIfExists,
  kAppend,
  kOverwrite,
  kIgnore,
};

/// Lower-case flag spelling: "errorifexists", "append", "overwrite",
/// "ignore".
std::string_view saveModeName(SaveMode mode);

/// Case-insensitive. Throws E_INVALID_ARGUMENT.
SaveMode parseSaveMode(std::string_view text);

} // namespace ncwc
