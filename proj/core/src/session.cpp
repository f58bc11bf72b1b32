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

#include "ncwc/session.h"

#include <chrono>
#include <cctype>
#include <charconv>
#include <set>

#include <fmt/format.h>

#include "fs_util.h"
#include "ncwc/error.h"
#include "ncwc/identifier.h"

namespace ncwc {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCredentialsFile = "_credentials";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

double millisSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

void checkCredentials(const SessionConfig& config) {
  if (config.user.empty() || config.password.empty()) {
    fail(ErrorCode::kAuth, "user and password must be non-empty");
  }
  if (config.user.find_first_of(":\n") != std::string::npos ||
      config.password.find('\n') != std::string::npos) {
    fail(ErrorCode::kAuth, "malformed credentials");
  }
  fs::path file = config.warehouseRoot / kCredentialsFile;
  if (!fs::exists(file)) {
    detail::writeFileAtomic(file, config.user + ":" + config.password + "\n");
    return;
  }
  std::string content = detail::readFile(file);
  for (auto line : detail::completeLines(content)) {
    auto colon = line.find(':');
    if (colon != std::string_view::npos && line.substr(0, colon) == config.user &&
        line.substr(colon + 1) == config.password) {
      return;
    }
  }
  fail(ErrorCode::kAuth, fmt::format("authentication failed for '{}'", config.user));
}

} // namespace

// ---------------------------------------------------------------------------
// SessionConfig
// ---------------------------------------------------------------------------

SessionConfig SessionConfig::underDirectory(const fs::path& base) {
  SessionConfig config;
  config.warehouseRoot = base / "warehouse";
  config.stagingDir = base / "staging";
  config.sessionCatalogRoot = base / "session";
  config.docstoreRoot = base / "docstore";
  return config;
}

void SessionConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == kWarehouseRoot) {
    warehouseRoot = fs::path(value);
  } else if (key == kStagingDir) {
    stagingDir = fs::path(value);
  } else if (key == kSessionRoot) {
    sessionCatalogRoot = fs::path(value);
  } else if (key == kDocstoreRoot) {
    docstoreRoot = fs::path(value);
  } else if (key == kParallelism) {
    int p = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), p);
    if (ec != std::errc() || ptr != value.data() + value.size() || p < 1) {
      fail(
          ErrorCode::kInvalidArgument,
          fmt::format("{} must be an integer >= 1, got '{}'", key, value));
    }
    parallelism = p;
  } else if (key == kDefaultDb) {
    checkIdentifier(value, "database");
    defaultDb = std::string(value);
  } else if (key == kUser) {
    user = std::string(value);
  } else if (key == kPassword) {
    password = std::string(value);
  } else {
    fail(ErrorCode::kInvalidArgument, fmt::format("unknown config key '{}'", key));
  }
}

void SessionConfig::loadText(std::string_view text) {
  int lineNo = 0;
  size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    std::string_view line = text.substr(
        start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineNo;
    auto hash = line.find('#');
    if (hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(
          ErrorCode::kInvalidArgument,
          fmt::format("config line {}: expected key = value", lineNo));
    }
    set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void SessionConfig::loadFile(const fs::path& file) {
  if (!fs::exists(file)) {
    fail(ErrorCode::kIo, fmt::format("config file '{}' not found", file.string()));
  }
  loadText(detail::readFile(file));
}

void SessionConfig::validate() const {
  if (parallelism < 1) {
    fail(ErrorCode::kInvalidArgument, "parallelism must be >= 1");
  }
  checkIdentifier(defaultDb, "database");
  std::set<fs::path> seen;
  for (const auto* path :
       {&warehouseRoot, &stagingDir, &sessionCatalogRoot, &docstoreRoot}) {
    if (path->empty()) {
      fail(ErrorCode::kInvalidArgument, "every root directory must be configured");
    }
    if (!seen.insert(fs::weakly_canonical(*path)).second) {
      fail(
          ErrorCode::kInvalidArgument,
          fmt::format("directory '{}' is configured twice", path->string()));
    }
  }
}

// ---------------------------------------------------------------------------
// Session
// ---------------------------------------------------------------------------

Session::Session(SessionConfig config) : config_(std::move(config)) {}

Session Session::build(SessionConfig config) {
  config.validate();
  Session session(std::move(config));
  const auto& c = session.config_;
  session.warehouse_ = std::make_unique<Warehouse>(c.warehouseRoot);
  session.sessionCatalog_ = std::make_unique<SessionCatalog>(c.sessionCatalogRoot);
  std::error_code ec;
  fs::create_directories(c.stagingDir, ec);
  if (ec) {
    fail(
        ErrorCode::kIo,
        fmt::format("cannot create staging dir '{}'", c.stagingDir.string()));
  }
  checkCredentials(c);
  session.warehouse_->createDatabase(c.defaultDb, /*ifNotExists=*/true);
  session.currentDb_ = c.defaultDb;
  return session;
}

void Session::setDatabase(const std::string& database) {
  if (!warehouse_->hasDatabase(database)) {
    fail(ErrorCode::kNoDatabase, database);
  }
  currentDb_ = database;
}

TableRef Session::resolve(std::string_view table) const {
  return TableRef::parse(table, currentDb_);
}

TableRef Session::resolve(const hql::QualifiedName& name) const {
  TableRef ref{name.database.value_or(currentDb_), name.name};
  checkIdentifier(ref.database, "database");
  checkIdentifier(ref.name, "table");
  return ref;
}

std::vector<std::string> Session::showDatabases() const {
  return warehouse_->showDatabases();
}

std::vector<std::string> Session::showTables() const {
  return warehouse_->showTables(currentDb_);
}

std::vector<DescribeRow> Session::describeTable(std::string_view table) const {
  auto ref = resolve(table);
  return warehouse_->describeTable(ref.database, ref.name);
}

bool Session::createDatabase(const std::string& name, bool ifNotExists) {
  return warehouse_->createDatabase(name, ifNotExists);
}

bool Session::dropDatabase(const std::string& name, bool ifExists, bool cascade) {
  if (name == currentDb_) {
    fail(ErrorCode::kInvalidArgument, "cannot drop the current database");
  }
  return warehouse_->dropDatabase(name, ifExists, cascade);
}

bool Session::dropTable(std::string_view table, bool ifExists, bool purge) {
  auto ref = resolve(table);
  return warehouse_->dropTable(ref.database, ref.name, ifExists, purge);
}

Session::CreateTableBuilder::CreateTableBuilder(Session* session, TableRef table)
    : session_(session) {
  meta_.database = std::move(table.database);
  meta_.name = std::move(table.name);
}

Session::CreateTableBuilder& Session::CreateTableBuilder::ifNotExists() {
  ifNotExists_ = true;
  return *this;
}

Session::CreateTableBuilder& Session::CreateTableBuilder::column(
    std::string name,
    std::string_view type) {
  return column(std::move(name), WarehouseType::parse(type));
}

Session::CreateTableBuilder& Session::CreateTableBuilder::column(
    std::string name,
    WarehouseType type) {
  meta_.columns.push_back({std::move(name), type});
  return *this;
}

Session::CreateTableBuilder& Session::CreateTableBuilder::partition(
    std::string name,
    std::string_view type) {
  partitions_.push_back({std::move(name), WarehouseType::parse(type)});
  return *this;
}

Session::CreateTableBuilder& Session::CreateTableBuilder::clusterBy(
    int numBuckets,
    std::vector<std::string> columns) {
  meta_.bucketSpec = BucketSpec{std::move(columns), numBuckets};
  return *this;
}

bool Session::CreateTableBuilder::create() {
  TableMeta meta = meta_;
  for (const auto& p : partitions_) {
    meta.columns.push_back(p);
    meta.partitionColumns.push_back(p.name);
  }
  return session_->warehouse_->createTable(meta, ifNotExists_);
}

Session::CreateTableBuilder Session::createTable(std::string_view table) {
  return CreateTableBuilder(this, resolve(table));
}

RecordBatch namesBatch(std::string column, const std::vector<std::string>& names) {
  RecordBatch batch =
      RecordBatch::empty({{std::move(column), WarehouseType::of(WarehouseType::Kind::kString)}});
  for (const auto& name : names) {
    batch.appendRow({DocValue(name)});
  }
  return batch;
}

namespace {

RecordBatch describeBatch(const Warehouse& warehouse, const TableRef& ref, bool extended) {
  using K = WarehouseType::Kind;
  RecordBatch batch = RecordBatch::empty({
      {"col_name", WarehouseType::of(K::kString)},
      {"data_type", WarehouseType::of(K::kString)},
      {"is_partition", WarehouseType::of(K::kBoolean)},
  });
  for (const auto& row : warehouse.describeTable(ref.database, ref.name)) {
    batch.appendRow({DocValue(row.column), DocValue(row.type), DocValue(row.partition)});
  }
  if (extended) {
    TableMeta meta = warehouse.tableMeta(ref.database, ref.name);
    LogState state = warehouse.logState(ref.database, ref.name);
    int64_t rows = 0;
    for (const auto& s : state.visible) {
      rows += s.rows;
    }
    std::string partitions;
    for (const auto& p : meta.partitionColumns) {
      partitions += (partitions.empty() ? "" : ", ") + p;
    }
    std::string buckets = "-1";
    if (meta.bucketSpec) {
      std::string cols;
      for (const auto& c : meta.bucketSpec->columns) {
        cols += (cols.empty() ? "" : ", ") + c;
      }
      buckets = fmt::format("{} BY ({})", meta.bucketSpec->numBuckets, cols);
    }
    auto detail = [&](std::string key, std::string value) {
      batch.appendRow({DocValue(std::move(key)), DocValue(std::move(value)), DocValue(false)});
    };
    detail("# Detailed Table Information", "");
    detail("Database", ref.database);
    detail("Table", ref.name);
    detail("Location", warehouse.tableDir(ref.database, ref.name).string());
    detail("Partition Columns", partitions);
    detail("Buckets", buckets);
    detail("Visible Segments", std::to_string(state.visible.size()));
    detail("Visible Rows", std::to_string(rows));
    detail("Last Transaction", std::to_string(state.maxTxnId));
  }
  return batch;
}

} // namespace

RecordBatch Session::run(const hql::Statement& statement, TransferReport* report) {
  struct Visitor {
    Session& self;
    TransferReport* report;

    RecordBatch operator()(const hql::SelectAll& s) const {
      auto ref = self.resolve(s.table);
      RecordBatch all =
          parallelRead(*self.warehouse_, ref, self.config_.parallelism, report);
      if (s.limit) {
        return all.slice(0, static_cast<size_t>(*s.limit));
      }
      return all;
    }
    RecordBatch operator()(const hql::Describe& d) const {
      return describeBatch(*self.warehouse_, self.resolve(d.table), d.extended);
    }
    RecordBatch operator()(const hql::ShowTables&) const {
      return namesBatch("tab_name", self.showTables());
    }
    RecordBatch operator()(const hql::ShowDatabases&) const {
      return namesBatch("database_name", self.showDatabases());
    }
    RecordBatch operator()(const hql::DropTable& d) const {
      auto ref = self.resolve(d.table);
      self.warehouse_->dropTable(ref.database, ref.name, d.ifExists, /*purge=*/false);
      return RecordBatch{};
    }
    RecordBatch operator()(const hql::CreateTable& c) const {
      TableMeta meta;
      meta.database = self.currentDb_;
      meta.name = c.name;
      meta.columns = c.columns;
      meta.bucketSpec = c.buckets;
      self.warehouse_->createTable(meta, c.ifNotExists);
      return RecordBatch{};
    }
  };
  return std::visit(Visitor{*this, report}, statement);
}

RecordBatch Session::execute(std::string_view text) {
  return run(hql::parse(text));
}

RecordBatch Session::executeQuery(std::string_view text, TransferReport* report) {
  auto statement = hql::parse(text);
  if (!std::holds_alternative<hql::SelectAll>(statement)) {
    throw hql::ParseError(1, 1, {"SELECT"}, "a non-query statement");
  }
  return run(statement, report);
}

TransferReport Session::writeDataset(
    const RecordBatch& batch,
    std::string_view table,
    SaveMode mode,
    const FaultHook& hook) {
  auto start = std::chrono::steady_clock::now();
  auto ref = resolve(table);
  TableMeta meta = warehouse_->tableMeta(ref.database, ref.name);
  StagedWrite staged = stageWrite(batch, config_.stagingDir, meta);
  TransferReport report;
  try {
    report = commitLoad(*warehouse_, ref, staged, mode, hook);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staged.jobDir, ec);
    throw;
  }
  report.serializationSteps += 1;
  report.wallTimeMs = millisSince(start);
  return report;
}

TransferReport Session::saveAsTable(
    const RecordBatch& batch,
    const std::string& database,
    const std::string& table,
    SaveMode mode) {
  auto start = std::chrono::steady_clock::now();
  TransferReport report;
  report.rowsMoved = sessionCatalog_->saveAsTable(batch, database, table, mode);
  report.serializationSteps = 1;
  report.wallTimeMs = millisSince(start);
  return report;
}

RecordBatch Session::sessionRead(const std::string& database, const std::string& table)
    const {
  return sessionCatalog_->read(database, table);
}

RecordBatch Session::sessionSql(std::string_view text) {
  auto statement = hql::parse(text);
  auto ref = [](const hql::QualifiedName& n) {
    return TableRef{n.database.value_or("default"), n.name};
  };
  if (const auto* s = std::get_if<hql::SelectAll>(&statement)) {
    auto r = ref(s->table);
    RecordBatch all = sessionCatalog_->read(r.database, r.name);
    return s->limit ? all.slice(0, static_cast<size_t>(*s->limit)) : all;
  }
  if (const auto* d = std::get_if<hql::DropTable>(&statement)) {
    auto r = ref(d->table);
    sessionCatalog_->dropTable(r.database, r.name, d->ifExists);
    return RecordBatch{};
  }
  if (std::holds_alternative<hql::ShowTables>(statement)) {
    return namesBatch("tableName", sessionCatalog_->listTables("default"));
  }
  if (std::holds_alternative<hql::ShowDatabases>(statement)) {
    return namesBatch("databaseName", sessionCatalog_->listDatabases());
  }
  fail(
      ErrorCode::kInvalidArgument,
      "session catalog supports SELECT, DROP TABLE and SHOW statements only");
}

} // namespace ncwc
