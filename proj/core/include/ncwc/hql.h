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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ncwc/error.h"
#include "ncwc/warehouse.h"

namespace ncwc::hql {

struct QualifiedName {
  std::optional<std::string> database;
  std::string name;

  friend bool operator==(const QualifiedName&, const QualifiedName&) = default;
};

struct SelectAll {
  QualifiedName table;
  std::optional<int64_t> limit;

  friend bool operator==(const SelectAll&, const SelectAll&) = default;
};

struct Describe {
  bool extended = false;
  QualifiedName table;

  friend bool operator==(const Describe&, const Describe&) = default;
};

struct ShowTables {
  friend bool operator==(const ShowTables&, const ShowTables&) = default;
};

struct ShowDatabases {
  friend bool operator==(const ShowDatabases&, const ShowDatabases&) = default;
};

struct DropTable {
  bool ifExists = false;
  QualifiedName table;

  friend bool operator==(const DropTable&, const DropTable&) = default;
};

struct CreateTable {
  bool ifNotExists = false;
  std::string name;
  std::vector<Column> columns;
  std::optional<BucketSpec> buckets;

  friend bool operator==(const CreateTable&, const CreateTable&) = default;
};

using Statement = std::
    variant<SelectAll, Describe, ShowTables, ShowDatabases, DropTable, CreateTable>;

/// E_PARSE with a 1-based source position and the tokens that would have
/// been accepted there.
class ParseError : public Error {
 public:
  ParseError(int line, int column, std::vector<std::string> expected, std::string found);

  int line() const {
    return line_;
  }
  int column() const {
    return column_;
  }
  const std::vector<std::string>& expected() const {
    return expected_;
  }

 private:
  int line_;
  int column_;
  std::vector<std::string> expected_;
};

/// Grammar (keywords case-insensitive):
///   SELECT * FROM [db.]ident [LIMIT n]
///   DESCRIBE [EXTENDED] [db.]ident
///   SHOW TABLES
///   SHOW DATABASES
///   DROP TABLE [IF EXISTS] [db.]ident
///   CREATE TABLE [IF NOT EXISTS] ident (col type, ...)
///       [CLUSTERED BY (col, ...) INTO n BUCKETS]
Statement parse(std::string_view text);

/// Deterministic pretty-printer; parse(render(s)) == s.
std::string render(const Statement& statement);

} // namespace ncwc::hql
