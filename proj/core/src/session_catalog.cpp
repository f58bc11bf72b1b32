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

#include "ncwc/session_catalog.h"

#include <algorithm>

#include <fmt/format.h>

#include "fs_util.h"
#include "ncwc/error.h"
#include "ncwc/identifier.h"

namespace ncwc {

namespace fs = std::filesystem;

namespace {
constexpr const char* kTableExt = ".ncwc";
constexpr const char* kLock = ".catalog.lock";
} // namespace

SessionCatalog::SessionCatalog(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "default", ec);
  if (ec) {
    fail(
        ErrorCode::kIo,
        fmt::format("cannot initialise session catalog at '{}'", root_.string()));
  }
}

fs::path SessionCatalog::tableFile(
    const std::string& database,
    const std::string& name) const {
  checkIdentifier(database, "database");
  checkIdentifier(name, "table");
  return root_ / database / (name + kTableExt);
}

std::vector<std::string> SessionCatalog::listDatabases() const {
  return detail::listIdentifierDirs(root_);
}

std::vector<std::string> SessionCatalog::listTables(
    const std::string& database) const {
  checkIdentifier(database, "database");
  if (!fs::is_directory(root_ / database)) {
    fail(ErrorCode::kNoDatabase, database);
  }
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(root_ / database)) {
    const auto& path = entry.path();
    if (entry.is_regular_file() && path.extension() == kTableExt &&
        isValidIdentifier(path.stem().string())) {
      names.push_back(path.stem().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

bool SessionCatalog::hasTable(
    const std::string& database,
    const std::string& name) const {
  return fs::exists(tableFile(database, name));
}

int64_t SessionCatalog::saveAsTable(
    const RecordBatch& batch,
    const std::string& database,
    const std::string& name,
    SaveMode mode) {
  batch.validate();
  fs::path file = tableFile(database, name);
  std::error_code ec;
  fs::create_directories(file.parent_path(), ec);
  detail::FileLock lock(root_ / kLock);

  std::vector<Column> schema = batch.schema;
  std::vector<Row> rows;
  if (fs::exists(file)) {
    switch (mode) {
      case SaveMode::kErrorIfExists:
        fail(
            ErrorCode::kExists,
            fmt::format("session table '{}.{}' exists", database, name));
      case SaveMode::kIgnore:
        return 0;
      case SaveMode::kAppend: {
        auto existing = segment_format::readFile(file);
        if (existing.columns != batch.schema) {
          fail(
              ErrorCode::kSchemaMismatch,
              fmt::format(
                  "append to '{}.{}' with a different schema", database, name));
        }
        rows = std::move(existing.rows);
        break;
      }
      case SaveMode::kOverwrite:
        break;
    }
  }
  auto fresh = batch.rows();
  for (auto& row : fresh) {
    for (size_t i = 0; i < row.size(); ++i) {
      row[i] = coerceToColumn(row[i], schema[i].type);
    }
    rows.push_back(std::move(row));
  }
  detail::writeFileAtomic(file, segment_format::encode(schema, rows));
  return static_cast<int64_t>(batch.rowCount);
}

RecordBatch SessionCatalog::read(
    const std::string& database,
    const std::string& name) const {
  fs::path file = tableFile(database, name);
  if (!fs::exists(file)) {
    fail(ErrorCode::kNoTable, fmt::format("session table {}.{}", database, name));
  }
  auto decoded = segment_format::readFile(file);
  return RecordBatch::fromRows(std::move(decoded.columns), decoded.rows);
}

std::vector<Column> SessionCatalog::schema(
    const std::string& database,
    const std::string& name) const {
  fs::path file = tableFile(database, name);
  if (!fs::exists(file)) {
    fail(ErrorCode::kNoTable, fmt::format("session table {}.{}", database, name));
  }
  // Only the header line is needed.
  std::string head = detail::readFilePrefix(file, 1 << 16);
  auto nl = head.find('\n');
  if (nl == std::string::npos) {
    return segment_format::readFile(file).columns;
  }
  return segment_format::decode(head.substr(0, nl + 1)).columns;
}

bool SessionCatalog::dropTable(
    const std::string& database,
    const std::string& name,
    bool ifExists) {
  fs::path file = tableFile(database, name);
  detail::FileLock lock(root_ / kLock);
  std::error_code ec;
  if (!fs::remove(file, ec)) {
    if (ifExists) {
      return false;
    }
    fail(ErrorCode::kNoTable, fmt::format("session table {}.{}", database, name));
  }
  return true;
}

} // namespace ncwc
