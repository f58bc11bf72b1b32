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

#include "ncwc/warehouse.h"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <unordered_set>

#include <fmt/format.h>

#include "fs_util.h"
#include "ncwc/error.h"
#include "ncwc/identifier.h"

namespace ncwc {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMetaFile = "_meta.json";
constexpr const char* kLogFile = "_txn.log";
constexpr const char* kTxnLock = ".txn.lock";
constexpr const char* kCatalogLock = ".catalog.lock";
constexpr const char* kTrashDir = ".trash";
constexpr const char* kSegmentExt = ".ncwc";

const DocValue& field(const Object& o, std::string_view name) {
  const DocValue* v = o.find(name);
  if (v == nullptr) {
    fail(ErrorCode::kIo, fmt::format("missing field '{}'", name));
  }
  return *v;
}

const std::string& textField(const Object& o, std::string_view name) {
  const auto* s = field(o, name).tryAs<std::string>();
  if (s == nullptr) {
    fail(ErrorCode::kIo, fmt::format("field '{}' is not text", name));
  }
  return *s;
}

int64_t intField(const Object& o, std::string_view name) {
  const DocValue& v = field(o, name);
  if (const auto* i = v.tryAs<int32_t>()) {
    return *i;
  }
  if (const auto* i = v.tryAs<int64_t>()) {
    return *i;
  }
  fail(ErrorCode::kIo, fmt::format("field '{}' is not an integer", name));
}

const Array& arrayField(const Object& o, std::string_view name) {
  const auto* a = field(o, name).tryAs<Array>();
  if (a == nullptr) {
    fail(ErrorCode::kIo, fmt::format("field '{}' is not an array", name));
  }
  return *a;
}

Array textArray(const std::vector<std::string>& items) {
  Array out;
  for (const auto& item : items) {
    out.emplace_back(item);
  }
  return out;
}

std::vector<std::string> fromTextArray(const Array& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    const auto* s = item.tryAs<std::string>();
    if (s == nullptr) {
      fail(ErrorCode::kIo, "expected a text array");
    }
    out.push_back(*s);
  }
  return out;
}

Array columnsToArray(std::span<const Column> columns) {
  Array out;
  for (const auto& column : columns) {
    out.emplace_back(Object{
        {"name", DocValue(column.name)},
        {"type", DocValue(column.type.toString())}});
  }
  return out;
}

std::vector<Column> columnsFromArray(const Array& items) {
  std::vector<Column> out;
  for (const auto& item : items) {
    const auto* o = item.tryAs<Object>();
    if (o == nullptr) {
      fail(ErrorCode::kIo, "column entry is not an object");
    }
    out.push_back(
        {textField(*o, "name"), WarehouseType::parse(textField(*o, "type"))});
  }
  return out;
}

size_t codePointCount(std::string_view s) {
  return static_cast<size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

[[noreturn]] void typeError(const DocValue& value, const WarehouseType& type) {
  fail(
      ErrorCode::kType,
      fmt::format(
          "{} value {} is not compatible with {}",
          docKindName(value.kind()),
          toCanonicalJson(value),
          type.toString()));
}

std::optional<int64_t> integerOf(const DocValue& value) {
  if (const auto* i = value.tryAs<int32_t>()) {
    return *i;
  }
  if (const auto* i = value.tryAs<int64_t>()) {
    return *i;
  }
  return std::nullopt;
}

std::string percentEncode(std::string_view s) {
  std::string out;
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '_' || c == '-' || c == '.') {
      out.push_back(ch);
    } else {
      out += fmt::format("%{:02X}", c);
    }
  }
  return out;
}

std::string_view txnStateName(TxnState s) {
  switch (s) {
    case TxnState::kBegin:
      return "BEGIN";
    case TxnState::kCommit:
      return "COMMIT";
    case TxnState::kAbort:
      return "ABORT";
  }
  return "?";
}

std::vector<TxnRecord> parseLog(std::string_view content) {
  std::vector<TxnRecord> records;
  for (auto line : detail::completeLines(content)) {
    if (!line.empty()) {
      records.push_back(TxnRecord::fromJson(line));
    }
  }
  return records;
}

bool segmentLess(const SegmentInfo& a, const SegmentInfo& b) {
  return std::tie(a.partitionKey, a.bucket, a.id) <
      std::tie(b.partitionKey, b.bucket, b.id);
}

} // namespace

// ---------------------------------------------------------------------------
// SaveMode
// ---------------------------------------------------------------------------

std::string_view saveModeName(SaveMode mode) {
  switch (mode) {
    case SaveMode::kErrorIfExists:
      return "errorifexists";
    case SaveMode::kAppend:
      return "append";
    case SaveMode::kOverwrite:
      return "overwrite";
    case SaveMode::kIgnore:
      return "ignore";
  }
  return "?";
}

SaveMode parseSaveMode(std::string_view text) {
  std::string lower(text);
  for (auto& c : lower) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  for (auto mode :
       {SaveMode::kErrorIfExists,
        SaveMode::kAppend,
        SaveMode::kOverwrite,
        SaveMode::kIgnore}) {
    if (lower == saveModeName(mode)) {
      return mode;
    }
  }
  fail(ErrorCode::kInvalidArgument, fmt::format("unknown save mode '{}'", text));
}

// ---------------------------------------------------------------------------
// TableMeta
// ---------------------------------------------------------------------------

void TableMeta::validate() const {
  auto bad = [&](const std::string& why) {
    fail(ErrorCode::kBadMeta, fmt::format("{}.{}: {}", database, name, why));
  };
  if (!isValidIdentifier(database) || !isValidIdentifier(name)) {
    bad("invalid database or table name");
  }
  if (columns.empty()) {
    bad("table needs at least one column");
  }
  std::set<std::string> seen;
  for (const auto& column : columns) {
    if (!isValidFieldName(column.name)) {
      bad(fmt::format("invalid column name '{}'", column.name));
    }
    if (!seen.insert(column.name).second) {
      bad(fmt::format("duplicate column '{}'", column.name));
    }
  }
  std::set<std::string> partitions;
  for (const auto& p : partitionColumns) {
    if (!seen.contains(p)) {
      bad(fmt::format("partition column '{}' is not a column", p));
    }
    if (!partitions.insert(p).second) {
      bad(fmt::format("duplicate partition column '{}'", p));
    }
  }
  if (partitions.size() == columns.size()) {
    bad("every column is a partition column");
  }
  if (bucketSpec) {
    if (bucketSpec->numBuckets < 1) {
      bad("num_buckets must be >= 1");
    }
    if (bucketSpec->columns.empty()) {
      bad("bucket column list is empty");
    }
    for (const auto& b : bucketSpec->columns) {
      if (!seen.contains(b)) {
        bad(fmt::format("bucket column '{}' is not a column", b));
      }
      if (partitions.contains(b)) {
        bad(fmt::format("'{}' is both a partition and a bucket column", b));
      }
    }
  }
}

std::optional<size_t> TableMeta::columnIndex(std::string_view column) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == column) {
      return i;
    }
  }
  return std::nullopt;
}

std::string TableMeta::toJson() const {
  Object o;
  o.set("database", DocValue(database));
  o.set("name", DocValue(name));
  o.set("columns", DocValue(columnsToArray(columns)));
  o.set("partition_cols", DocValue(textArray(partitionColumns)));
  if (bucketSpec) {
    o.set(
        "bucket_spec",
        DocValue(Object{
            {"columns", DocValue(textArray(bucketSpec->columns))},
            {"num_buckets", DocValue(bucketSpec->numBuckets)}}));
  } else {
    o.set("bucket_spec", DocValue());
  }
  return toCanonicalJson(DocValue(std::move(o)));
}

TableMeta TableMeta::fromJson(std::string_view json) {
  DocValue v = parseJson(json);
  const auto* o = v.tryAs<Object>();
  if (o == nullptr) {
    fail(ErrorCode::kIo, "table metadata is not an object");
  }
  TableMeta meta;
  meta.database = textField(*o, "database");
  meta.name = textField(*o, "name");
  meta.columns = columnsFromArray(arrayField(*o, "columns"));
  meta.partitionColumns = fromTextArray(arrayField(*o, "partition_cols"));
  const DocValue& bucket = field(*o, "bucket_spec");
  if (const auto* b = bucket.tryAs<Object>()) {
    meta.bucketSpec = BucketSpec{
        fromTextArray(arrayField(*b, "columns")),
        static_cast<int>(intField(*b, "num_buckets"))};
  }
  return meta;
}

// ---------------------------------------------------------------------------
// Rows, partitions, buckets
// ---------------------------------------------------------------------------

DocValue coerceToColumn(const DocValue& value, const WarehouseType& type) {
  using K = WarehouseType::Kind;
  if (value.isNull()) {
    return value;
  }
  auto integerIn = [&](int64_t lo, int64_t hi) -> DocValue {
    auto i = integerOf(value);
    if (!i || *i < lo || *i > hi) {
      typeError(value, type);
    }
    return DocValue(static_cast<int32_t>(*i));
  };
  switch (type.kind) {
    case K::kBoolean:
      if (value.kind() != DocKind::kBoolean) {
        typeError(value, type);
      }
      return value;
    case K::kTinyint:
      return integerIn(-128, 127);
    case K::kSmallint:
      return integerIn(-32768, 32767);
    case K::kInt:
      return integerIn(
          std::numeric_limits<int32_t>::min(),
          std::numeric_limits<int32_t>::max());
    case K::kBigint: {
      auto i = integerOf(value);
      if (!i) {
        typeError(value, type);
      }
      return DocValue(*i);
    }
    case K::kFloat:
    case K::kDouble:
    case K::kDecimal: {
      double d;
      if (auto i = integerOf(value)) {
        d = static_cast<double>(*i);
      } else if (const auto* x = value.tryAs<double>()) {
        d = *x;
      } else {
        typeError(value, type);
      }
      if (type.kind == K::kFloat) {
        d = static_cast<double>(static_cast<float>(d));
      }
      return DocValue(d);
    }
    case K::kChar: {
      const auto* s = value.tryAs<std::string>();
      if (s == nullptr || codePointCount(*s) > static_cast<size_t>(type.length)) {
        typeError(value, type);
      }
      return value;
    }
    case K::kString:
      if (value.kind() != DocKind::kText) {
        typeError(value, type);
      }
      return value;
    case K::kTimestamp:
      if (value.kind() != DocKind::kTimestamp) {
        typeError(value, type);
      }
      return value;
    case K::kBinary:
      if (value.kind() != DocKind::kBinary) {
        typeError(value, type);
      }
      return value;
  }
  typeError(value, type);
}

PartitionKey partitionKeyOf(const Row& row, const TableMeta& meta) {
  PartitionKey key;
  for (const auto& column : meta.partitionColumns) {
    auto index = meta.columnIndex(column);
    key.emplace_back(column, toCanonicalJson(row.at(*index)));
  }
  return key;
}

fs::path partitionPath(const PartitionKey& key) {
  fs::path out;
  for (const auto& [column, value] : key) {
    out /= percentEncode(column) + "=" + percentEncode(value);
  }
  return out;
}

uint64_t fnv1a64(std::span<const uint8_t> bytes, uint64_t seed) {
  constexpr uint64_t kPrime = 0x100000001b3ULL;
  uint64_t hash = seed;
  for (uint8_t b : bytes) {
    hash ^= b;
    hash *= kPrime;
  }
  return hash;
}

int assignBucket(const Row& row, const TableMeta& meta) {
  if (!meta.bucketSpec) {
    fail(
        ErrorCode::kNoBucketSpec,
        fmt::format("{}.{} is not bucketed", meta.database, meta.name));
  }
  std::vector<uint8_t> key;
  for (const auto& column : meta.bucketSpec->columns) {
    auto index = meta.columnIndex(column);
    canonicalEncodeTo(row.at(*index), key);
  }
  return static_cast<int>(
      fnv1a64(key) % static_cast<uint64_t>(meta.bucketSpec->numBuckets));
}

std::vector<RowGroup> groupRowsForWrite(
    const TableMeta& meta,
    std::span<const Row> rows) {
  // Coerce everything before any file is written.
  std::map<std::pair<PartitionKey, int>, std::vector<Row>> groups;
  for (const auto& row : rows) {
    if (row.size() != meta.columns.size()) {
      fail(
          ErrorCode::kType,
          fmt::format(
              "row has {} values, table has {} columns",
              row.size(),
              meta.columns.size()));
    }
    Row stored;
    stored.reserve(row.size());
    for (size_t i = 0; i < row.size(); ++i) {
      stored.push_back(coerceToColumn(row[i], meta.columns[i].type));
    }
    int bucket = meta.bucketSpec ? assignBucket(stored, meta) : 0;
    groups[{partitionKeyOf(stored, meta), bucket}].push_back(std::move(stored));
  }
  std::vector<RowGroup> out;
  out.reserve(groups.size());
  for (auto& [key, groupRows] : groups) {
    out.push_back({key.first, key.second, std::move(groupRows)});
  }
  return out;
}

std::string segmentRelativePath(
    const PartitionKey& key,
    int bucket,
    const std::string& segmentId) {
  return (partitionPath(key) /
          fmt::format("{}-{}{}", bucket, segmentId, kSegmentExt))
      .string();
}

// ---------------------------------------------------------------------------
// Segment format
// ---------------------------------------------------------------------------

namespace segment_format {

std::string schemaJson(std::span<const Column> columns) {
  return toCanonicalJson(DocValue(columnsToArray(columns)));
}

std::string encode(std::span<const Column> columns, std::span<const Row> rows) {
  std::string out;
  out += kMagic;
  out.push_back(' ');
  out += schemaJson(columns);
  out.push_back('\n');
  for (const auto& row : rows) {
    if (row.size() != columns.size()) {
      fail(ErrorCode::kType, "row width does not match segment schema");
    }
    out.push_back('[');
    for (size_t i = 0; i < row.size(); ++i) {
      if (i > 0) {
        out.push_back(',');
      }
      appendCanonicalJson(row[i], out);
    }
    out += "]\n";
  }
  return out;
}

Decoded decode(std::string_view content) {
  auto lines = detail::completeLines(content);
  if (lines.empty() || !lines[0].starts_with(kMagic) ||
      lines[0].size() <= kMagic.size() || lines[0][kMagic.size()] != ' ') {
    fail(ErrorCode::kIo, "not an NCWC1 segment");
  }
  Decoded out;
  DocValue schema = parseJson(lines[0].substr(kMagic.size() + 1));
  const auto* columns = schema.tryAs<Array>();
  if (columns == nullptr) {
    fail(ErrorCode::kIo, "segment schema is not an array");
  }
  out.columns = columnsFromArray(*columns);
  for (size_t i = 1; i < lines.size(); ++i) {
    DocValue row = parseJson(lines[i]);
    auto* values = row.tryAs<Array>();
    if (values == nullptr || values->size() != out.columns.size()) {
      fail(ErrorCode::kIo, fmt::format("malformed segment row {}", i));
    }
    out.rows.push_back(*values);
  }
  return out;
}

void writeFile(
    const fs::path& path,
    std::span<const Column> columns,
    std::span<const Row> rows) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  detail::writeFileAtomic(path, encode(columns, rows));
}

Decoded readFile(const fs::path& path) {
  return decode(detail::readFile(path));
}

} // namespace segment_format

// ---------------------------------------------------------------------------
// Transaction records
// ---------------------------------------------------------------------------

std::string TxnRecord::toJson() const {
  Object o;
  o.set("txn_id", integerValue(txnId));
  o.set("state", DocValue(std::string(txnStateName(state))));
  o.set("op", DocValue(op == TxnOp::kAppend ? "APPEND" : "OVERWRITE"));
  if (batchId) {
    o.set("batch_id", integerValue(*batchId));
  }
  if (state == TxnState::kCommit) {
    Array segs;
    for (const auto& s : segments) {
      Array key;
      for (const auto& [column, value] : s.partitionKey) {
        key.emplace_back(Array{DocValue(column), DocValue(value)});
      }
      segs.emplace_back(Object{
          {"id", DocValue(s.id)},
          {"partition", DocValue(std::move(key))},
          {"bucket", DocValue(s.bucket)},
          {"rows", integerValue(s.rows)},
          {"path", DocValue(s.path)}});
    }
    o.set("segments", DocValue(std::move(segs)));
  }
  return toCanonicalJson(DocValue(std::move(o)));
}

TxnRecord TxnRecord::fromJson(std::string_view json) {
  DocValue v;
  try {
    v = parseJson(json);
  } catch (const Error& e) {
    fail(ErrorCode::kIo, fmt::format("corrupt txn log record: {}", e.detail()));
  }
  const auto* o = v.tryAs<Object>();
  if (o == nullptr) {
    fail(ErrorCode::kIo, "txn log record is not an object");
  }
  TxnRecord r;
  r.txnId = intField(*o, "txn_id");
  const auto& state = textField(*o, "state");
  if (state == "BEGIN") {
    r.state = TxnState::kBegin;
  } else if (state == "COMMIT") {
    r.state = TxnState::kCommit;
  } else if (state == "ABORT") {
    r.state = TxnState::kAbort;
  } else {
    fail(ErrorCode::kIo, fmt::format("unknown txn state '{}'", state));
  }
  r.op = textField(*o, "op") == "OVERWRITE" ? TxnOp::kOverwrite
                                            : TxnOp::kAppend;
  if (o->contains("batch_id")) {
    r.batchId = intField(*o, "batch_id");
  }
  if (o->contains("segments")) {
    for (const auto& item : arrayField(*o, "segments")) {
      const auto* s = item.tryAs<Object>();
      if (s == nullptr) {
        fail(ErrorCode::kIo, "segment entry is not an object");
      }
      SegmentInfo info;
      info.id = textField(*s, "id");
      info.bucket = static_cast<int>(intField(*s, "bucket"));
      info.rows = intField(*s, "rows");
      info.path = textField(*s, "path");
      for (const auto& pair : arrayField(*s, "partition")) {
        auto kv = fromTextArray(pair.as<Array>());
        if (kv.size() != 2) {
          fail(ErrorCode::kIo, "partition key entry must be a pair");
        }
        info.partitionKey.emplace_back(kv[0], kv[1]);
      }
      r.segments.push_back(std::move(info));
    }
  }
  return r;
}

LogState replayLog(std::span<const TxnRecord> records) {
  LogState state;
  // txn id -> terminated?
  std::map<int64_t, bool> begun;
  for (const auto& r : records) {
    state.maxTxnId = std::max(state.maxTxnId, r.txnId);
    auto it = begun.find(r.txnId);
    switch (r.state) {
      case TxnState::kBegin:
        if (it == begun.end()) {
          begun.emplace(r.txnId, false);
        }
        break;
      case TxnState::kCommit:
        if (it == begun.end() || it->second) {
          break;
        }
        it->second = true;
        if (r.op == TxnOp::kOverwrite) {
          state.visible.clear();
        }
        for (const auto& s : r.segments) {
          state.visible.push_back(s);
          state.referenced.push_back(s.id);
        }
        if (r.batchId) {
          state.lastCommittedBatchId =
              std::max(state.lastCommittedBatchId, *r.batchId);
        }
        break;
      case TxnState::kAbort:
        if (it != begun.end()) {
          it->second = true;
        }
        break;
    }
  }
  for (const auto& [id, terminated] : begun) {
    if (!terminated) {
      state.openTxns.push_back(id);
    }
  }
  return state;
}

// ---------------------------------------------------------------------------
// Transaction
// ---------------------------------------------------------------------------

Transaction::Transaction(
    Warehouse* warehouse,
    TableMeta meta,
    int64_t id,
    std::optional<int64_t> batchId)
    : warehouse_(warehouse),
      meta_(std::move(meta)),
      id_(id),
      batchId_(batchId) {}

Transaction::Transaction(Transaction&& other) noexcept
    : warehouse_(other.warehouse_),
      meta_(std::move(other.meta_)),
      id_(other.id_),
      batchId_(other.batchId_),
      op_(other.op_),
      open_(other.open_),
      segments_(std::move(other.segments_)) {
  other.open_ = false;
}

Transaction::~Transaction() {
  if (open_ && warehouse_ != nullptr) {
    warehouse_->abortNoThrow(*this);
  }
}

// ---------------------------------------------------------------------------
// Warehouse
// ---------------------------------------------------------------------------

Warehouse::Warehouse(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "default", ec);
  if (ec) {
    fail(
        ErrorCode::kIo,
        fmt::format("cannot initialise warehouse at '{}'", root_.string()));
  }
}

void Warehouse::checkDatabase(const std::string& name) const {
  checkIdentifier(name, "database");
  if (!fs::is_directory(root_ / name)) {
    fail(ErrorCode::kNoDatabase, name);
  }
}

bool Warehouse::hasDatabase(const std::string& name) const {
  return isValidIdentifier(name) && fs::is_directory(root_ / name);
}

bool Warehouse::createDatabase(const std::string& name, bool ifNotExists) {
  checkIdentifier(name, "database");
  detail::FileLock lock(root_ / kCatalogLock);
  if (fs::is_directory(root_ / name)) {
    if (ifNotExists) {
      return false;
    }
    fail(ErrorCode::kExists, fmt::format("database '{}' exists", name));
  }
  std::error_code ec;
  fs::create_directories(root_ / name, ec);
  if (ec) {
    fail(ErrorCode::kIo, fmt::format("cannot create database '{}'", name));
  }
  detail::fsyncDirectory(root_);
  return true;
}

bool Warehouse::dropDatabase(
    const std::string& name,
    bool ifExists,
    bool cascade) {
  checkIdentifier(name, "database");
  if (name == "default") {
    fail(ErrorCode::kInvalidArgument, "the default database cannot be dropped");
  }
  detail::FileLock lock(root_ / kCatalogLock);
  if (!fs::is_directory(root_ / name)) {
    if (ifExists) {
      return false;
    }
    fail(ErrorCode::kNoDatabase, name);
  }
  if (!showTables(name).empty() && !cascade) {
    fail(ErrorCode::kNotEmpty, fmt::format("database '{}' has tables", name));
  }
  std::error_code ec;
  fs::remove_all(root_ / name, ec);
  if (ec) {
    fail(ErrorCode::kIo, fmt::format("cannot remove database '{}'", name));
  }
  return true;
}

std::vector<std::string> Warehouse::showDatabases() const {
  return detail::listIdentifierDirs(root_);
}

std::vector<std::string> Warehouse::showTables(
    const std::string& database) const {
  checkDatabase(database);
  std::vector<std::string> tables;
  for (auto& name : detail::listIdentifierDirs(root_ / database)) {
    if (fs::exists(root_ / database / name / kMetaFile)) {
      tables.push_back(std::move(name));
    }
  }
  return tables;
}

fs::path Warehouse::tableDir(
    const std::string& database,
    const std::string& name) const {
  checkIdentifier(database, "database");
  checkIdentifier(name, "table");
  return root_ / database / name;
}

bool Warehouse::hasTable(const std::string& database, const std::string& name)
    const {
  return isValidIdentifier(database) && isValidIdentifier(name) &&
      fs::exists(root_ / database / name / kMetaFile);
}

bool Warehouse::createTable(const TableMeta& meta, bool ifNotExists) {
  meta.validate();
  detail::FileLock lock(root_ / kCatalogLock);
  checkDatabase(meta.database);
  fs::path dir = tableDir(meta.database, meta.name);
  if (fs::exists(dir / kMetaFile)) {
    if (ifNotExists) {
      return false;
    }
    fail(
        ErrorCode::kExists,
        fmt::format("table '{}.{}' exists", meta.database, meta.name));
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  fs::create_directories(dir, ec);
  if (ec) {
    fail(ErrorCode::kIo, fmt::format("cannot create '{}'", dir.string()));
  }
  detail::writeFileAtomic(dir / kLogFile, "");
  // The metadata file is the catalog entry, so it is written last.
  detail::writeFileAtomic(dir / kMetaFile, meta.toJson() + "\n");
  detail::fsyncDirectory(dir.parent_path());
  return true;
}

bool Warehouse::dropTable(
    const std::string& database,
    const std::string& name,
    bool ifExists,
    bool purge) {
  detail::FileLock lock(root_ / kCatalogLock);
  fs::path dir = tableDir(database, name);
  if (!fs::exists(dir / kMetaFile)) {
    if (ifExists) {
      return false;
    }
    fail(ErrorCode::kNoTable, fmt::format("{}.{}", database, name));
  }
  std::error_code ec;
  if (purge) {
    fs::remove_all(dir, ec);
  } else {
    int64_t lastTxn = logState(database, name).maxTxnId;
    fs::path trash = root_ / kTrashDir / database /
        fmt::format("{}.{}", name, lastTxn);
    fs::remove_all(trash, ec);
    fs::create_directories(trash.parent_path(), ec);
    fs::rename(dir, trash, ec);
  }
  if (ec) {
    fail(
        ErrorCode::kIo,
        fmt::format("cannot drop '{}.{}': {}", database, name, ec.message()));
  }
  return true;
}

TableMeta Warehouse::tableMeta(
    const std::string& database,
    const std::string& name) const {
  fs::path file = tableDir(database, name) / kMetaFile;
  if (!fs::exists(file)) {
    fail(ErrorCode::kNoTable, fmt::format("{}.{}", database, name));
  }
  return TableMeta::fromJson(detail::readFile(file));
}

std::vector<DescribeRow> Warehouse::describeTable(
    const std::string& database,
    const std::string& name) const {
  TableMeta meta = tableMeta(database, name);
  std::vector<DescribeRow> rows;
  for (const auto& column : meta.columns) {
    bool partition = std::find(
                         meta.partitionColumns.begin(),
                         meta.partitionColumns.end(),
                         column.name) != meta.partitionColumns.end();
    rows.push_back({column.name, column.type.toString(), partition});
  }
  return rows;
}

std::vector<TxnRecord> Warehouse::readLog(
    const std::string& database,
    const std::string& name) const {
  fs::path dir = tableDir(database, name);
  if (!fs::exists(dir / kMetaFile)) {
    fail(ErrorCode::kNoTable, fmt::format("{}.{}", database, name));
  }
  return parseLog(detail::readFile(dir / kLogFile));
}

LogState Warehouse::logState(
    const std::string& database,
    const std::string& name) const {
  auto records = readLog(database, name);
  return replayLog(records);
}

int64_t Warehouse::visibleRows(
    const std::string& database,
    const std::string& name) const {
  int64_t total = 0;
  for (const auto& s : logState(database, name).visible) {
    total += s.rows;
  }
  return total;
}

void Warehouse::appendRecord(const TableMeta& meta, const TxnRecord& record) {
  fs::path dir = tableDir(meta.database, meta.name);
  if (!fs::exists(dir / kMetaFile)) {
    fail(ErrorCode::kNoTable, fmt::format("{}.{}", meta.database, meta.name));
  }
  detail::appendDurable(dir / kLogFile, record.toJson() + "\n");
}

Transaction Warehouse::begin(
    const std::string& database,
    const std::string& name,
    std::optional<int64_t> batchId) {
  TableMeta meta = tableMeta(database, name);
  fs::path dir = tableDir(database, name);
  detail::FileLock lock(dir / kTxnLock);
  detail::truncateToLastNewline(dir / kLogFile);
  LogState state = logState(database, name);
  if (!state.openTxns.empty()) {
    fail(
        ErrorCode::kTxnOpen,
        fmt::format(
            "{}.{} has open transaction {}",
            database,
            name,
            state.openTxns.front()));
  }
  TxnRecord record;
  record.txnId = state.maxTxnId + 1;
  record.state = TxnState::kBegin;
  record.batchId = batchId;
  appendRecord(meta, record);
  return Transaction(this, std::move(meta), record.txnId, batchId);
}

std::vector<SegmentInfo> Warehouse::writeRows(
    Transaction& txn,
    std::span<const Row> rows,
    SaveMode mode) {
  if (!txn.open_) {
    fail(ErrorCode::kNoTxn, "transaction is not open");
  }
  const TableMeta& meta = txn.meta_;
  int64_t committed = visibleRows(meta.database, meta.name);
  switch (mode) {
    case SaveMode::kErrorIfExists:
      if (committed > 0) {
        fail(
            ErrorCode::kExists,
            fmt::format("{}.{} already has rows", meta.database, meta.name));
      }
      break;
    case SaveMode::kIgnore:
      if (committed > 0) {
        return {};
      }
      break;
    case SaveMode::kOverwrite:
      txn.op_ = TxnOp::kOverwrite;
      break;
    case SaveMode::kAppend:
      break;
  }

  auto groups = groupRowsForWrite(meta, rows);
  fs::path dir = tableDir(meta.database, meta.name);
  std::vector<SegmentInfo> written;
  for (auto& group : groups) {
    SegmentInfo info;
    info.id = newUuid();
    info.partitionKey = std::move(group.partitionKey);
    info.bucket = group.bucket;
    info.rows = static_cast<int64_t>(group.rows.size());
    info.path = segmentRelativePath(info.partitionKey, info.bucket, info.id);
    segment_format::writeFile(dir / info.path, meta.columns, group.rows);
    txn.segments_.push_back(info);
    written.push_back(std::move(info));
  }
  return written;
}

void Warehouse::addSegment(Transaction& txn, SegmentInfo info) {
  if (!txn.open_) {
    fail(ErrorCode::kNoTxn, "transaction is not open");
  }
  txn.segments_.push_back(std::move(info));
}

void Warehouse::markOverwrite(Transaction& txn) {
  txn.op_ = TxnOp::kOverwrite;
}

void Warehouse::commit(Transaction& txn) {
  if (!txn.open_) {
    fail(ErrorCode::kNoTxn, "transaction is not open");
  }
  fs::path dir = tableDir(txn.meta_.database, txn.meta_.name);
  detail::FileLock lock(dir / kTxnLock);
  TxnRecord record;
  record.txnId = txn.id_;
  record.state = TxnState::kCommit;
  record.op = txn.op_;
  record.batchId = txn.batchId_;
  record.segments = txn.segments_;
  std::sort(record.segments.begin(), record.segments.end(), segmentLess);
  appendRecord(txn.meta_, record);
  txn.open_ = false;
}

void Warehouse::abort(Transaction& txn) {
  if (!txn.open_) {
    fail(ErrorCode::kNoTxn, "transaction is not open");
  }
  fs::path dir = tableDir(txn.meta_.database, txn.meta_.name);
  {
    detail::FileLock lock(dir / kTxnLock);
    TxnRecord record;
    record.txnId = txn.id_;
    record.state = TxnState::kAbort;
    record.op = txn.op_;
    record.batchId = txn.batchId_;
    appendRecord(txn.meta_, record);
    txn.open_ = false;
  }
  std::error_code ec;
  for (const auto& s : txn.segments_) {
    fs::remove(dir / s.path, ec);
  }
}

void Warehouse::abortNoThrow(Transaction& txn) noexcept {
  try {
    abort(txn);
  } catch (...) {
    txn.open_ = false;
  }
}

std::vector<Row> Warehouse::readSegment(
    const std::string& database,
    const std::string& name,
    const SegmentInfo& segment) const {
  return segment_format::readFile(tableDir(database, name) / segment.path)
      .rows;
}

std::vector<Row> Warehouse::scanTable(
    const std::string& database,
    const std::string& name) const {
  std::vector<Row> rows;
  for (const auto& segment : logState(database, name).visible) {
    auto segmentRows = readSegment(database, name, segment);
    rows.insert(
        rows.end(),
        std::make_move_iterator(segmentRows.begin()),
        std::make_move_iterator(segmentRows.end()));
  }
  return rows;
}

int Warehouse::recoverTable(const std::string& database, const std::string& name) {
  TableMeta meta = tableMeta(database, name);
  fs::path dir = tableDir(database, name);
  detail::FileLock lock(dir / kTxnLock);
  detail::truncateToLastNewline(dir / kLogFile);
  LogState state = logState(database, name);
  for (int64_t id : state.openTxns) {
    TxnRecord record;
    record.txnId = id;
    record.state = TxnState::kAbort;
    appendRecord(meta, record);
  }
  std::unordered_set<std::string> referenced(
      state.referenced.begin(), state.referenced.end());
  std::vector<fs::path> orphans;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    const auto& path = entry.path();
    if (!entry.is_regular_file() || path.extension() != kSegmentExt) {
      continue;
    }
    auto stem = path.stem().string();
    auto dash = stem.find('-');
    std::string id = dash == std::string::npos ? stem : stem.substr(dash + 1);
    if (!referenced.contains(id)) {
      orphans.push_back(path);
    }
  }
  std::error_code ec;
  for (const auto& path : orphans) {
    fs::remove(path, ec);
  }
  return static_cast<int>(state.openTxns.size());
}

} // namespace ncwc
