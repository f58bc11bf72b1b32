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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncwc/save_mode.h"
#include "ncwc/warehouse.h"

namespace ncwc {

struct TableRef {
  std::string database;
  std::string name;

  /// "db.table" or "table" (resolved against `defaultDatabase`).
  static TableRef parse(
      std::string_view text,
      std::string_view defaultDatabase = "default");
  std::string toString() const;

  friend bool operator==(const TableRef&, const TableRef&) = default;
  friend auto operator<=>(const TableRef&, const TableRef&) = default;
};

/// Column-major interchange unit.
struct RecordBatch {
  std::vector<Column> schema;
  std::vector<std::vector<DocValue>> columns;
  size_t rowCount = 0;

  static RecordBatch empty(std::vector<Column> schema);
  static RecordBatch fromRows(std::vector<Column> schema, std::span<const Row> rows);

  void appendRow(Row row);
  Row row(size_t index) const;
  std::vector<Row> rows() const;
  /// Rows [offset, offset + count) clamped to the batch.
  RecordBatch slice(size_t offset, size_t count) const;

  /// Throws E_INVALID_ARGUMENT if column vectors and row_count disagree.
  void validate() const;

  friend bool operator==(const RecordBatch&, const RecordBatch&) = default;
};

struct InputSplit {
  TableRef table;
  int splitIndex = 0;
  std::vector<std::string> segmentIds;
  /// Segment descriptors in the same order as segmentIds.
  std::vector<SegmentInfo> segments;
  int64_t rowTotal = 0;
};

/// Instrumented outcome of a transfer step or job.
struct TransferReport {
  int64_t rowsMoved = 0;
  int64_t splitCount = 0;
  int64_t inferencePasses = 0;
  int64_t serializationSteps = 0;
  int64_t stagingFiles = 0;
  double wallTimeMs = 0;

  /// Adds counters; wall time is not accumulated.
  void merge(const TransferReport& other);
  std::string toJson() const;
};

/// At most `parallelism` splits. Visible segments are assigned in scan order
/// to the split with the smallest row total, ties to the lowest index.
/// Throws E_NO_TABLE.
std::vector<InputSplit> planSplits(
    const Warehouse& warehouse,
    const TableRef& table,
    int parallelism);

/// Rows of the split's segments in split order. Throws E_STALE_SPLIT if any
/// segment is no longer visible.
/// Number of split plans made by this process so far.
int64_t splitPlanCount();

RecordBatch fetchSplit(const Warehouse& warehouse, const InputSplit& split);

/// Fetches every split concurrently and assembles the result in the table's
/// scan order, so the output is identical for every parallelism.
RecordBatch parallelRead(
    const Warehouse& warehouse,
    const TableRef& table,
    int parallelism,
    TransferReport* report = nullptr);

struct StagedFile {
  std::filesystem::path path;
  SegmentInfo info;
};

struct StagedWrite {
  /// <staging_dir>/<job-uuid>
  std::filesystem::path jobDir;
  std::vector<Column> schema;
  std::vector<StagedFile> files;
  int64_t rows = 0;
};

/// Throws E_SCHEMA_MISMATCH unless the batch has the table's column names in
/// order with assignable types.
void checkSchemaCompatible(
    std::span<const Column> batchSchema,
    const TableMeta& meta);

/// Writes the batch as segment files under <staging_dir>/<job-uuid>/ grouped
/// by partition and bucket. Nothing becomes visible to the table.
StagedWrite stageWrite(
    const RecordBatch& batch,
    const std::filesystem::path& stagingDir,
    const TableMeta& meta);

/// Called with the name of each commitLoad step ("begin", "check",
/// "move:<i>", "commit") before it runs. Throwing aborts the load.
using FaultHook = std::function<void(std::string_view step)>;

/// Adopts the staged files into the table in one transaction by renaming
/// them. On failure the table is unchanged and the staged files are back in
/// place. On success (and for Ignore on a non-empty table) the staging job
/// directory is removed.
TransferReport commitLoad(
    Warehouse& warehouse,
    const TableRef& table,
    const StagedWrite& staged,
    SaveMode mode,
    const FaultHook& hook = {});

} // namespace ncwc
