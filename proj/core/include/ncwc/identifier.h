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

#include <string>
#include <string_view>

namespace ncwc {

/// Database, collection and table names: [A-Za-z_][A-Za-z0-9_]*, at most 64
/// bytes.
bool isValidIdentifier(std::string_view name);

/// Throws E_INVALID_ARGUMENT naming `what` when the identifier is invalid.
void checkIdentifier(std::string_view name, std::string_view what);

/// Random RFC 4122 version 4 UUID in canonical lower-case text form.
std::string newUuid();

} // namespace ncwc
