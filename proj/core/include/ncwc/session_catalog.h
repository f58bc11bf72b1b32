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

#include <filesystem>
#include <string>
#include <vector>

#include "ncwc/interchange.h"
#include "ncwc/save_mode.h"

namespace ncwc {

/// The session-side catalog, independent from the warehouse. Each table is a
/// single segment-format file <root>/<db>/<table>.ncwc whose header carries
/// the schema; saves replace it atomically. No partitions, buckets or
/// transaction log.
class SessionCatalog {
 public:
  /// Creates the root and its `default` database when missing.
  explicit SessionCatalog(std::filesystem::path root);

  const std::filesystem::path& root() const {
    return root_;
  }

  std::vector<std::string> listDatabases() const;
  /// Throws E_NO_DATABASE.
  std::vector<std::string> listTables(const std::string& database) const;
  bool hasTable(const std::string& database, const std::string& name) const;

  /// saveAsTable: creates the table from the batch schema when absent.
  /// ErrorIfExists fails (E_EXISTS) and Ignore is a no-op when the table
  /// exists; Append requires an identical schema (E_SCHEMA_MISMATCH);
  /// Overwrite replaces schema and rows. Returns the number of rows written.
  int64_t saveAsTable(
      const RecordBatch& batch,
      const std::string& database,
      const std::string& name,
      SaveMode mode);

  /// Throws E_NO_TABLE.
  RecordBatch read(const std::string& database, const std::string& name)
      const;
  std::vector<Column> schema(const std::string& database, const std::string& name)
      const;

  bool dropTable(
      const std::string& database,
      const std::string& name,
      bool ifExists);

 private:
  std::filesystem::path tableFile(
      const std::string& database,
      const std::string& name) const;

  std::filesystem::path root_;
};

} // namespace ncwc
