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

#include "ncwc/interchange.h"

#include <algorithm>
#include <atomic>
#include <future>
#include <unordered_map>

#include <fmt/format.h>

#include "fs_util.h"
#include "ncwc/error.h"
#include "ncwc/identifier.h"

namespace ncwc {

namespace fs = std::filesystem;

TableRef TableRef::parse(std::string_view text, std::string_view defaultDatabase) {
  TableRef ref;
  auto dot = text.find('.');
  if (dot == std::string_view::npos) {
    ref.database = std::string(defaultDatabase);
    ref.name = std::string(text);
  } else {
    ref.database = std::string(text.substr(0, dot));
    ref.name = std::string(text.substr(dot + 1));
  }
  checkIdentifier(ref.database, "database");
  checkIdentifier(ref.name, "table");
  return ref;
}

std::string TableRef::toString() const {
  return database + "." + name;
}

// ---------------------------------------------------------------------------
// RecordBatch
// ---------------------------------------------------------------------------

RecordBatch RecordBatch::empty(std::vector<Column> schema) {
  RecordBatch batch;
  batch.columns.resize(schema.size());
  batch.schema = std::move(schema);
  return batch;
}

RecordBatch RecordBatch::fromRows(
    std::vector<Column> schema,
    std::span<const Row> rows) {
  RecordBatch batch = empty(std::move(schema));
  for (auto& column : batch.columns) {
    column.reserve(rows.size());
  }
  for (const auto& row : rows) {
    batch.appendRow(row);
  }
  return batch;
}

void RecordBatch::appendRow(Row row) {
  if (row.size() != schema.size()) {
    fail(
        ErrorCode::kInvalidArgument,
        fmt::format(
            "row has {} values, batch has {} columns",
            row.size(),
            schema.size()));
  }
  for (size_t i = 0; i < row.size(); ++i) {
    columns[i].push_back(std::move(row[i]));
  }
  ++rowCount;
}

Row RecordBatch::row(size_t index) const {
  Row out;
  out.reserve(columns.size());
  for (const auto& column : columns) {
    out.push_back(column.at(index));
  }
  return out;
}

std::vector<Row> RecordBatch::rows() const {
  std::vector<Row> out;
  out.reserve(rowCount);
  for (size_t i = 0; i < rowCount; ++i) {
    out.push_back(row(i));
  }
  return out;
}

RecordBatch RecordBatch::slice(size_t offset, size_t count) const {
  RecordBatch out = empty(schema);
  size_t end = std::min(rowCount, offset + std::min(count, rowCount));
  for (size_t i = offset; i < end; ++i) {
    out.appendRow(row(i));
  }
  return out;
}

void RecordBatch::validate() const {
  if (columns.size() != schema.size()) {
    fail(ErrorCode::kInvalidArgument, "column count differs from schema");
  }
  for (const auto& column : columns) {
    if (column.size() != rowCount) {
      fail(ErrorCode::kInvalidArgument, "column length differs from row_count");
    }
  }
}

// ---------------------------------------------------------------------------
// TransferReport
// ---------------------------------------------------------------------------

void TransferReport::merge(const TransferReport& other) {
  rowsMoved += other.rowsMoved;
  splitCount += other.splitCount;
  inferencePasses += other.inferencePasses;
  serializationSteps += other.serializationSteps;
  stagingFiles += other.stagingFiles;
}

std::string TransferReport::toJson() const {
  return toCanonicalJson(DocValue(Object{
      {"rows_moved", integerValue(rowsMoved)},
      {"split_count", integerValue(splitCount)},
      {"inference_passes", integerValue(inferencePasses)},
      {"serialization_steps", integerValue(serializationSteps)},
      {"staging_files", integerValue(stagingFiles)},
      {"wall_time_ms", DocValue(wallTimeMs)},
  }));
}

// ---------------------------------------------------------------------------
// Reads
// ---------------------------------------------------------------------------

namespace {

std::atomic<int64_t> planCalls{0};

std::vector<InputSplit> planFromVisible(
    const TableRef& table,
    const std::vector<SegmentInfo>& visible,
    int parallelism) {
  planCalls.fetch_add(1, std::memory_order_relaxed);
  if (parallelism < 1) {
    fail(ErrorCode::kInvalidArgument, "parallelism must be >= 1");
  }
  size_t count = std::min(static_cast<size_t>(parallelism), visible.size());
  std::vector<InputSplit> splits(count);
  for (size_t i = 0; i < count; ++i) {
    splits[i].table = table;
    splits[i].splitIndex = static_cast<int>(i);
  }
  for (const auto& segment : visible) {
    auto target = std::min_element(
        splits.begin(),
        splits.end(),
        [](const InputSplit& a, const InputSplit& b) {
          return a.rowTotal < b.rowTotal;
        });
    target->segmentIds.push_back(segment.id);
    target->segments.push_back(segment);
    target->rowTotal += segment.rows;
  }
  return splits;
}

std::vector<Column> tableSchema(const Warehouse& warehouse, const TableRef& t) {
  return warehouse.tableMeta(t.database, t.name).columns;
}

/// Per-segment row chunks of one split.
std::vector<std::vector<Row>> fetchSegments(
    const Warehouse& warehouse,
    const InputSplit& split) {
  auto state = warehouse.logState(split.table.database, split.table.name);
  std::unordered_map<std::string, const SegmentInfo*> visible;
  for (const auto& s : state.visible) {
    visible.emplace(s.id, &s);
  }
  std::vector<std::vector<Row>> chunks;
  chunks.reserve(split.segmentIds.size());
  for (const auto& id : split.segmentIds) {
    auto it = visible.find(id);
    if (it == visible.end()) {
      fail(
          ErrorCode::kStaleSplit,
          fmt::format(
              "segment {} of split {} is no longer visible in {}",
              id,
              split.splitIndex,
              split.table.toString()));
    }
    chunks.push_back(
        warehouse.readSegment(split.table.database, split.table.name, *it->second));
  }
  return chunks;
}

} // namespace

int64_t splitPlanCount() {
  return planCalls.load(std::memory_order_relaxed);
}

std::vector<InputSplit> planSplits(
    const Warehouse& warehouse,
    const TableRef& table,
    int parallelism) {
  auto state = warehouse.logState(table.database, table.name);
  return planFromVisible(table, state.visible, parallelism);
}

RecordBatch fetchSplit(const Warehouse& warehouse, const InputSplit& split) {
  RecordBatch batch = RecordBatch::empty(tableSchema(warehouse, split.table));
  for (auto& chunk : fetchSegments(warehouse, split)) {
    for (auto& row : chunk) {
      batch.appendRow(std::move(row));
    }
  }
  return batch;
}

RecordBatch parallelRead(
    const Warehouse& warehouse,
    const TableRef& table,
    int parallelism,
    TransferReport* report) {
  auto schema = tableSchema(warehouse, table);
  auto state = warehouse.logState(table.database, table.name);
  auto splits = planFromVisible(table, state.visible, parallelism);

  std::vector<std::future<std::vector<std::vector<Row>>>> inFlight;
  inFlight.reserve(splits.size());
  for (const auto& split : splits) {
    inFlight.push_back(std::async(std::launch::async, [&warehouse, &split] {
      return fetchSegments(warehouse, split);
    }));
  }

  std::unordered_map<std::string, std::vector<Row>> bySegment;
  for (size_t i = 0; i < splits.size(); ++i) {
    auto chunks = inFlight[i].get();
    for (size_t k = 0; k < chunks.size(); ++k) {
      bySegment.emplace(splits[i].segmentIds[k], std::move(chunks[k]));
    }
  }

  RecordBatch batch = RecordBatch::empty(std::move(schema));
  for (const auto& segment : state.visible) {
    for (auto& row : bySegment.at(segment.id)) {
      batch.appendRow(std::move(row));
    }
  }
  if (report != nullptr) {
    report->splitCount += static_cast<int64_t>(splits.size());
    report->rowsMoved += static_cast<int64_t>(batch.rowCount);
  }
  return batch;
}

// ---------------------------------------------------------------------------
// Writes
// ---------------------------------------------------------------------------

namespace {

enum class TypeFamily { kBoolean, kInteger, kFloating, kText, kTimestamp, kBinary };

TypeFamily familyOf(const WarehouseType& type) {
  using K = WarehouseType::Kind;
  switch (type.kind) {
    case K::kBoolean:
      return TypeFamily::kBoolean;
    case K::kTinyint:
    case K::kSmallint:
    case K::kInt:
    case K::kBigint:
      return TypeFamily::kInteger;
    case K::kFloat:
    case K::kDouble:
    case K::kDecimal:
      return TypeFamily::kFloating;
    case K::kChar:
    case K::kString:
      return TypeFamily::kText;
    case K::kTimestamp:
      return TypeFamily::kTimestamp;
    case K::kBinary:
      return TypeFamily::kBinary;
  }
  return TypeFamily::kText;
}

bool assignable(const WarehouseType& from, const WarehouseType& to) {
  auto f = familyOf(from);
  auto t = familyOf(to);
  return f == t || (f == TypeFamily::kInteger && t == TypeFamily::kFloating);
}

} // namespace

void checkSchemaCompatible(
    std::span<const Column> batchSchema,
    const TableMeta& meta) {
  auto mismatch = [&](const std::string& why) {
    fail(
        ErrorCode::kSchemaMismatch,
        fmt::format("{}.{}: {}", meta.database, meta.name, why));
  };
  if (batchSchema.size() != meta.columns.size()) {
    mismatch(fmt::format(
        "batch has {} columns, table has {}",
        batchSchema.size(),
        meta.columns.size()));
  }
  for (size_t i = 0; i < batchSchema.size(); ++i) {
    const auto& from = batchSchema[i];
    const auto& to = meta.columns[i];
    if (from.name != to.name) {
      mismatch(fmt::format(
          "column {} is '{}' in the batch but '{}' in the table",
          i,
          from.name,
          to.name));
    }
    if (!assignable(from.type, to.type)) {
      mismatch(fmt::format(
          "column '{}' has type {} but the table declares {}",
          from.name,
          from.type.toString(),
          to.type.toString()));
    }
  }
}

StagedWrite stageWrite(
    const RecordBatch& batch,
    const fs::path& stagingDir,
    const TableMeta& meta) {
  batch.validate();
  checkSchemaCompatible(batch.schema, meta);
  auto groups = groupRowsForWrite(meta, batch.rows());

  StagedWrite staged;
  staged.jobDir = stagingDir / newUuid();
  staged.schema = meta.columns;
  std::error_code ec;
  fs::create_directories(staged.jobDir, ec);
  if (ec) {
    fail(
        ErrorCode::kIo,
        fmt::format("cannot create staging dir '{}'", staged.jobDir.string()));
  }
  try {
    for (auto& group : groups) {
      StagedFile file;
      file.info.id = newUuid();
      file.info.partitionKey = std::move(group.partitionKey);
      file.info.bucket = group.bucket;
      file.info.rows = static_cast<int64_t>(group.rows.size());
      file.info.path = segmentRelativePath(
          file.info.partitionKey, file.info.bucket, file.info.id);
      file.path = staged.jobDir / file.info.path;
      segment_format::writeFile(file.path, meta.columns, group.rows);
      staged.rows += file.info.rows;
      staged.files.push_back(std::move(file));
    }
  } catch (...) {
    fs::remove_all(staged.jobDir, ec);
    throw;
  }
  return staged;
}

TransferReport commitLoad(
    Warehouse& warehouse,
    const TableRef& table,
    const StagedWrite& staged,
    SaveMode mode,
    const FaultHook& hook) {
  auto step = [&](std::string_view name) {
    if (hook) {
      hook(name);
    }
  };
  TransferReport report;
  report.stagingFiles = static_cast<int64_t>(staged.files.size());

  TableMeta meta = warehouse.tableMeta(table.database, table.name);
  if (staged.schema != meta.columns) {
    fail(
        ErrorCode::kSchemaMismatch,
        fmt::format("staged files do not match {}", table.toString()));
  }

  step("begin");
  Transaction txn = warehouse.begin(table.database, table.name);
  fs::path dir = warehouse.tableDir(table.database, table.name);
  std::vector<const StagedFile*> moved;
  std::error_code ec;
  try {
    step("check");
    int64_t committed = warehouse.visibleRows(table.database, table.name);
    if (committed > 0 && mode == SaveMode::kErrorIfExists) {
      fail(
          ErrorCode::kExists,
          fmt::format("{} already has rows", table.toString()));
    }
    if (committed > 0 && mode == SaveMode::kIgnore) {
      warehouse.abort(txn);
      fs::remove_all(staged.jobDir, ec);
      return report;
    }
    if (mode == SaveMode::kOverwrite) {
      warehouse.markOverwrite(txn);
    }
    for (size_t i = 0; i < staged.files.size(); ++i) {
      step(fmt::format("move:{}", i));
      const auto& file = staged.files[i];
      fs::path target = dir / file.info.path;
      fs::create_directories(target.parent_path(), ec);
      fs::rename(file.path, target, ec);
      if (ec) {
        fail(
            ErrorCode::kIo,
            fmt::format(
                "cannot move '{}' into {}: {}",
                file.path.string(),
                table.toString(),
                ec.message()));
      }
      moved.push_back(&file);
      warehouse.addSegment(txn, file.info);
    }
    step("commit");
    warehouse.commit(txn);
  } catch (...) {
    for (auto it = moved.rbegin(); it != moved.rend(); ++it) {
      fs::rename(dir / (*it)->info.path, (*it)->path, ec);
    }
    if (txn.isOpen()) {
      try {
        warehouse.abort(txn);
      } catch (...) {
      }
    }
    throw;
  }
  fs::remove_all(staged.jobDir, ec);
  report.rowsMoved = staged.rows;
  return report;
}

} // namespace ncwc
