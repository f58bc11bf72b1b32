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
#include <string>
#include <string_view>
#include <vector>

#include "ncwc/docstore.h"
#include "ncwc/interchange.h"
#include "ncwc/save_mode.h"
#include "ncwc/session.h"

namespace ncwc {

enum class JobKind {
  kDocToWarehouse,
  kWarehouseToDoc,
  kDocToSession,
  kSessionToDoc,
  kSessionToWarehouse,
  kWarehouseToSession,
};

/// Flag spelling: doc2wh, wh2doc, doc2sess, sess2doc, sess2wh, wh2sess.
std::string_view jobKindName(JobKind kind);
/// Human label, e.g. "docstore -> warehouse".
std::string_view jobKindLabel(JobKind kind);
/// Throws E_INVALID_ARGUMENT.
JobKind parseJobKind(std::string_view text);

/// Source and destination are "db.collection" for document collections and
/// "db.table" or "table" for tables. Unqualified session tables live in
/// `default`, unqualified warehouse tables in the session's current database.
struct JobSpec {
  JobKind kind = JobKind::kDocToWarehouse;
  std::string source;
  std::string dest;
  SaveMode mode = SaveMode::kErrorIfExists;
  bool dropTable = false;
  /// Session table used by wh2doc; generated when empty.
  std::string tempTableName;

  void validate() const;
};

/// Document for one row: SQL NULLs are left out, a non-Text `_id` is
/// rendered as text and a missing `_id` is generated on insert.
Object rowToObject(std::span<const Column> schema, const Row& row);

/// Batch with one column per inferred column, in inferred order.
RecordBatch documentsToBatch(
    std::span<const Document> docs,
    const InferredSchema& schema);

class JobRunner {
 public:
  JobRunner(Session& session, DocStore& docs);

  TransferReport run(const JobSpec& spec);

  TransferReport importDocToWarehouse(const JobSpec& spec);
  TransferReport importWarehouseToDoc(const JobSpec& spec);
  TransferReport importDocToSession(const JobSpec& spec);
  TransferReport importSessionToDoc(const JobSpec& spec);
  TransferReport importSessionToWarehouse(const JobSpec& spec);
  TransferReport importWarehouseToSession(const JobSpec& spec);

 private:
  /// Writes documents honoring the save mode; counts one serialization step.
  TransferReport saveDocuments(
      const RecordBatch& batch,
      const CollectionRef& dest,
      SaveMode mode);

  Session& session_;
  DocStore& docs_;
};

struct BenchmarkRow {
  JobKind kind;
  TransferReport report;
};

struct BenchmarkResult {
  int64_t rows = 0;
  int parallelism = 0;
  std::vector<BenchmarkRow> jobs;
  double totalMs = 0;
};

/// Deterministic documents with nested arrays, an always-null field and a
/// field that is null in every other document.
std::vector<Object> syntheticDocuments(int64_t count, uint64_t seed = 42);

/// Generates a collection of `rows` documents under `scratch` (which must be
/// empty or absent) and runs the six jobs in the order doc2wh, wh2doc,
/// doc2sess, sess2doc, sess2wh, wh2sess.
BenchmarkResult runBenchmark(
    int64_t rows,
    int parallelism,
    const std::filesystem::path& scratch);

std::string formatBenchmarkTable(const BenchmarkResult& result);
std::string benchmarkJson(const BenchmarkResult& result);

} // namespace ncwc
