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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ncwc/hql.h"
#include "ncwc/interchange.h"
#include "ncwc/session_catalog.h"
#include "ncwc/warehouse.h"

namespace ncwc {

/// Connector configuration. File form is flat "key = value" lines with '#'
/// comments, using the keys below.
struct SessionConfig {
  static constexpr std::string_view kWarehouseRoot = "connector.warehouse.root";
  static constexpr std::string_view kStagingDir = "connector.staging.dir";
  static constexpr std::string_view kParallelism = "connector.parallelism";
  static constexpr std::string_view kSessionRoot = "connector.session.root";
  static constexpr std::string_view kDocstoreRoot = "connector.docstore.root";
  static constexpr std::string_view kDefaultDb = "connector.default.db";
  static constexpr std::string_view kUser = "connector.user";
  static constexpr std::string_view kPassword = "connector.password";

  std::filesystem::path warehouseRoot;
  std::filesystem::path stagingDir;
  std::filesystem::path sessionCatalogRoot;
  std::filesystem::path docstoreRoot;
  int parallelism = 2;
  std::string defaultDb = "default";
  std::string user = "hive";
  std::string password = "123456";

  /// warehouse/, staging/, session/ and docstore/ under `base`.
  static SessionConfig underDirectory(const std::filesystem::path& base);

  /// Applies one key. Throws E_INVALID_ARGUMENT for unknown keys or bad
  /// values.
  void set(std::string_view key, std::string_view value);
  /// Applies every "key = value" line of a config file on top of *this.
  void loadFile(const std::filesystem::path& file);
  void loadText(std::string_view text);

  /// Paths set and pairwise distinct, parallelism >= 1.
  void validate() const;
};

/// The user-facing connector handle: configuration, current database, the
/// warehouse catalog and the session catalog. Used by one thread at a time.
class Session {
 public:
  /// Opens or initialises both catalogs and checks the credentials against
  /// <warehouse_root>/_credentials (created from the config on first use).
  /// The default database is created when absent. Throws E_AUTH, E_IO.
  static Session build(SessionConfig config);

  const SessionConfig& config() const {
    return config_;
  }
  const std::string& currentDatabase() const {
    return currentDb_;
  }
  Warehouse& warehouse() {
    return *warehouse_;
  }
  const Warehouse& warehouse() const {
    return *warehouse_;
  }
  SessionCatalog& sessionCatalog() {
    return *sessionCatalog_;
  }

  /// Throws E_NO_DATABASE.
  void setDatabase(const std::string& database);
  /// "db.table" or an unqualified name resolved against the current
  /// database.
  TableRef resolve(std::string_view table) const;
  TableRef resolve(const hql::QualifiedName& name) const;

  // Catalog operations.
  std::vector<std::string> showDatabases() const;
  std::vector<std::string> showTables() const;
  std::vector<DescribeRow> describeTable(std::string_view table) const;
  bool createDatabase(const std::string& name, bool ifNotExists);
  bool dropDatabase(const std::string& name, bool ifExists, bool cascade);
  bool dropTable(std::string_view table, bool ifExists, bool purge);

  class CreateTableBuilder {
   public:
    CreateTableBuilder& ifNotExists();
    CreateTableBuilder& column(std::string name, std::string_view type);
    CreateTableBuilder& column(std::string name, WarehouseType type);
    CreateTableBuilder& partition(std::string name, std::string_view type);
    CreateTableBuilder& clusterBy(int numBuckets, std::vector<std::string> columns);
    /// Returns false when the table existed and ifNotExists() was set.
    bool create();

   private:
    friend class Session;
    CreateTableBuilder(Session* session, TableRef table);

    Session* session_;
    TableMeta meta_;
    std::vector<Column> partitions_;
    bool ifNotExists_ = false;
  };
  CreateTableBuilder createTable(std::string_view table);

  /// Runs a non-SELECT statement and returns its tabular result.
  RecordBatch execute(std::string_view text);
  /// Runs SELECT * through the parallel read path with the configured
  /// parallelism; LIMIT applies after assembly.
  RecordBatch executeQuery(std::string_view text, TransferReport* report = nullptr);
  RecordBatch run(const hql::Statement& statement, TransferReport* report = nullptr);

  /// Batch write to a warehouse table: stage, then load. The staging job
  /// directory is removed on success and on failure.
  TransferReport writeDataset(
      const RecordBatch& batch,
      std::string_view table,
      SaveMode mode,
      const FaultHook& hook = {});

  /// Session-catalog access (the other catalog).
  TransferReport saveAsTable(
      const RecordBatch& batch,
      const std::string& database,
      const std::string& table,
      SaveMode mode);
  RecordBatch sessionRead(const std::string& database, const std::string& table) const;
  /// Statements against the session catalog: SELECT *, DROP TABLE,
  /// SHOW TABLES, SHOW DATABASES. Unqualified names use `default`.
  RecordBatch sessionSql(std::string_view text);

 private:
  explicit Session(SessionConfig config);

  SessionConfig config_;
  std::string currentDb_;
  std::unique_ptr<Warehouse> warehouse_;
  std::unique_ptr<SessionCatalog> sessionCatalog_;
};

/// Single-column STRING batch, e.g. for SHOW results.
RecordBatch namesBatch(std::string column, const std::vector<std::string>& names);

} // namespace ncwc
