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
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ncwc/document.h"
#include "ncwc/save_mode.h"

namespace ncwc {

struct Column {
  std::string name;
  WarehouseType type;

  friend bool operator==(const Column&, const Column&) = default;
};

struct BucketSpec {
  std::vector<std::string> columns;
  int numBuckets = 1;

  friend bool operator==(const BucketSpec&, const BucketSpec&) = default;
};

struct TableMeta {
  std::string database;
  std::string name;
  std::vector<Column> columns;
  std::vector<std::string> partitionColumns;
  std::optional<BucketSpec> bucketSpec;

  /// Throws E_BAD_META: unknown or duplicate column names, partition and
  /// bucket columns overlapping, num_buckets < 1, invalid identifiers.
  void validate() const;

  std::optional<size_t> columnIndex(std::string_view column) const;

  std::string toJson() const;
  static TableMeta fromJson(std::string_view json);

  friend bool operator==(const TableMeta&, const TableMeta&) = default;
};

/// One table row; values are aligned with TableMeta::columns.
using Row = std::vector<DocValue>;

/// Checks that `value` may be stored in a column of `type` and returns it in
/// the column's storage form (e.g. Int32 widened to Int64 for BIGINT). Null
/// is accepted everywhere. Throws E_TYPE.
DocValue coerceToColumn(const DocValue& value, const WarehouseType& type);

/// (column, canonical JSON of the value) for each partition column.
using PartitionKey = std::vector<std::pair<std::string, std::string>>;

PartitionKey partitionKeyOf(const Row& row, const TableMeta& meta);

/// Relative directory for a partition, one "col=value" level per column with
/// unsafe bytes percent-encoded. Empty for unpartitioned tables.
std::filesystem::path partitionPath(const PartitionKey& key);

/// 64-bit FNV-1a.
uint64_t fnv1a64(std::span<const uint8_t> bytes, uint64_t seed = 0xcbf29ce484222325ULL);

/// FNV-1a over the concatenated canonical encodings of the bucket columns,
/// modulo num_buckets. Throws E_NO_BUCKET_SPEC.
int assignBucket(const Row& row, const TableMeta& meta);

/// Rows destined for one segment.
struct RowGroup {
  PartitionKey partitionKey;
  int bucket = 0;
  std::vector<Row> rows;
};

/// Coerces every value to its column type and groups rows by (partition,
/// bucket), ordered by that key. Throws E_TYPE.
std::vector<RowGroup> groupRowsForWrite(
    const TableMeta& meta,
    std::span<const Row> rows);

/// "<partition path>/<bucket>-<segment_id>.ncwc"
std::string segmentRelativePath(
    const PartitionKey& key,
    int bucket,
    const std::string& segmentId);

struct SegmentInfo {
  std::string id;
  PartitionKey partitionKey;
  int bucket = 0;
  int64_t rows = 0;
  /// Relative to the table directory.
  std::string path;

  friend bool operator==(const SegmentInfo&, const SegmentInfo&) = default;
};

/// Segment file codec: header line "NCWC1 <canonical-JSON schema>" followed
/// by one canonical-JSON array per row.
namespace segment_format {

constexpr std::string_view kMagic = "NCWC1";

std::string schemaJson(std::span<const Column> columns);
std::string encode(std::span<const Column> columns, std::span<const Row> rows);

struct Decoded {
  std::vector<Column> columns;
  std::vector<Row> rows;
};
Decoded decode(std::string_view content);

void writeFile(
    const std::filesystem::path& path,
    std::span<const Column> columns,
    std::span<const Row> rows);
Decoded readFile(const std::filesystem::path& path);

} // namespace segment_format

enum class TxnState { kBegin, kCommit, kAbort };
enum class TxnOp { kAppend, kOverwrite };

struct TxnRecord {
  int64_t txnId = 0;
  TxnState state = TxnState::kBegin;
  TxnOp op = TxnOp::kAppend;
  std::optional<int64_t> batchId;
  /// Populated on COMMIT records only.
  std::vector<SegmentInfo> segments;

  std::string toJson() const;
  static TxnRecord fromJson(std::string_view json);

  friend bool operator==(const TxnRecord&, const TxnRecord&) = default;
};

/// Result of replaying a transaction log prefix.
struct LogState {
  /// Visible segments in scan order.
  std::vector<SegmentInfo> visible;
  /// BEGIN records with no terminal record.
  std::vector<int64_t> openTxns;
  int64_t maxTxnId = 0;
  /// Highest batch_id among COMMIT records, -1 when none.
  int64_t lastCommittedBatchId = -1;
  /// Every segment id referenced by any COMMIT record.
  std::vector<std::string> referenced;
};

LogState replayLog(std::span<const TxnRecord> records);

class Warehouse;

/// An open write transaction on one table. Destroying an open transaction
/// aborts it.
class Transaction {
 public:
  Transaction(Transaction&& other) noexcept;
  Transaction& operator=(Transaction&&) = delete;
  Transaction(const Transaction&) = delete;
  ~Transaction();

  int64_t id() const {
    return id_;
  }
  std::optional<int64_t> batchId() const {
    return batchId_;
  }
  bool isOpen() const {
    return open_;
  }
  const TableMeta& meta() const {
    return meta_;
  }
  TxnOp op() const {
    return op_;
  }
  const std::vector<SegmentInfo>& segments() const {
    return segments_;
  }

 private:
  friend class Warehouse;
  Transaction(
      Warehouse* warehouse,
      TableMeta meta,
      int64_t id,
      std::optional<int64_t> batchId);

  Warehouse* warehouse_;
  TableMeta meta_;
  int64_t id_;
  std::optional<int64_t> batchId_;
  TxnOp op_ = TxnOp::kAppend;
  bool open_ = true;
  std::vector<SegmentInfo> segments_;
};

struct DescribeRow {
  std::string column;
  std::string type;
  bool partition = false;

  friend bool operator==(const DescribeRow&, const DescribeRow&) = default;
};

/// Embedded transactional warehouse. Layout:
///   <root>/<db>/<table>/_meta.json
///   <root>/<db>/<table>/_txn.log
///   <root>/<db>/<table>/<partition dirs>/<bucket>-<segment_id>.ncwc
class Warehouse {
 public:
  /// Creates the root and the `default` database when missing.
  explicit Warehouse(std::filesystem::path root);

  const std::filesystem::path& root() const {
    return root_;
  }

  bool createDatabase(const std::string& name, bool ifNotExists);
  bool dropDatabase(const std::string& name, bool ifExists, bool cascade);
  bool hasDatabase(const std::string& name) const;
  std::vector<std::string> showDatabases() const;
  std::vector<std::string> showTables(const std::string& database) const;

  bool createTable(const TableMeta& meta, bool ifNotExists);
  /// purge=false moves the table under <root>/.trash/<db>/<name>.<txn_id>/.
  bool dropTable(
      const std::string& database,
      const std::string& name,
      bool ifExists,
      bool purge);
  bool hasTable(const std::string& database, const std::string& name) const;
  TableMeta tableMeta(const std::string& database, const std::string& name)
      const;
  std::vector<DescribeRow> describeTable(
      const std::string& database,
      const std::string& name) const;
  std::filesystem::path tableDir(
      const std::string& database,
      const std::string& name) const;

  /// Appends BEGIN. Throws E_TXN_OPEN when the log has an unterminated
  /// BEGIN.
  Transaction begin(
      const std::string& database,
      const std::string& name,
      std::optional<int64_t> batchId = std::nullopt);

  /// Writes one segment per (partition, bucket) group. Nothing becomes
  /// visible until commit.
  std::vector<SegmentInfo> writeRows(
      Transaction& txn,
      std::span<const Row> rows,
      SaveMode mode);

  /// Registers an already written segment file (located under the table
  /// directory at info.path) with the transaction.
  void addSegment(Transaction& txn, SegmentInfo info);
  /// Switches the commit to OVERWRITE semantics.
  void markOverwrite(Transaction& txn);

  void commit(Transaction& txn);
  /// Appends ABORT and removes the transaction's segment files.
  void abort(Transaction& txn);

  std::vector<TxnRecord> readLog(
      const std::string& database,
      const std::string& name) const;
  LogState logState(const std::string& database, const std::string& name)
      const;
  /// Committed row count.
  int64_t visibleRows(const std::string& database, const std::string& name)
      const;

  /// Visible rows in (txn, segment, row) order.
  std::vector<Row> scanTable(
      const std::string& database,
      const std::string& name) const;
  std::vector<Row> readSegment(
      const std::string& database,
      const std::string& name,
      const SegmentInfo& segment) const;

  /// Aborts unterminated transactions and removes segment files no COMMIT
  /// references. Returns the number of transactions aborted.
  int recoverTable(const std::string& database, const std::string& name);

 private:
  friend class Transaction;

  void checkDatabase(const std::string& name) const;
  void appendRecord(const TableMeta& meta, const TxnRecord& record);
  void abortNoThrow(Transaction& txn) noexcept;

  std::filesystem::path root_;
};

} // namespace ncwc
