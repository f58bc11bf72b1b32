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

#include "ncwc/jobs.h"

#include <algorithm>
#include <chrono>
#include <random>

#include <fmt/format.h>

#include "ncwc/error.h"
#include "ncwc/identifier.h"

namespace ncwc {

namespace fs = std::filesystem;

namespace {

struct KindInfo {
  JobKind kind;
  std::string_view name;
  std::string_view label;
};

constexpr KindInfo kKinds[] = {
    {JobKind::kDocToWarehouse, "doc2wh", "docstore -> warehouse"},
    {JobKind::kWarehouseToDoc, "wh2doc", "warehouse -> docstore"},
    {JobKind::kDocToSession, "doc2sess", "docstore -> session"},
    {JobKind::kSessionToDoc, "sess2doc", "session -> docstore"},
    {JobKind::kSessionToWarehouse, "sess2wh", "session -> warehouse"},
    {JobKind::kWarehouseToSession, "wh2sess", "warehouse -> session"},
};

const KindInfo& infoOf(JobKind kind) {
  for (const auto& info : kKinds) {
    if (info.kind == kind) {
      return info;
    }
  }
  fail(ErrorCode::kInvalidArgument, "unknown job kind");
}

bool readsDocs(JobKind kind) {
  return kind == JobKind::kDocToWarehouse || kind == JobKind::kDocToSession;
}
bool writesDocs(JobKind kind) {
  return kind == JobKind::kWarehouseToDoc || kind == JobKind::kSessionToDoc;
}

TableRef sessionRef(std::string_view text) {
  return TableRef::parse(text, "default");
}

std::string idText(const DocValue& value) {
  switch (value.kind()) {
    case DocKind::kText:
      return value.as<std::string>();
    case DocKind::kInt32:
      return std::to_string(value.as<int32_t>());
    case DocKind::kInt64:
      return std::to_string(value.as<int64_t>());
    default:
      return toCanonicalJson(value);
  }
}

double millisSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

std::vector<Document> scanCollection(const DocStore& store, const std::string& ref) {
  CollectionRef coll = CollectionRef::parse(ref);
  return store.scanAll(coll);
}

} // namespace

std::string_view jobKindName(JobKind kind) {
  return infoOf(kind).name;
}

std::string_view jobKindLabel(JobKind kind) {
  return infoOf(kind).label;
}

JobKind parseJobKind(std::string_view text) {
  for (const auto& info : kKinds) {
    if (info.name == text) {
      return info.kind;
    }
  }
  fail(ErrorCode::kInvalidArgument, fmt::format("unknown job '{}'", text));
}

void JobSpec::validate() const {
  if (readsDocs(kind)) {
    CollectionRef::parse(source);
  } else {
    TableRef::parse(source);
  }
  if (writesDocs(kind)) {
    CollectionRef::parse(dest);
  } else {
    TableRef::parse(dest);
  }
  if (!tempTableName.empty()) {
    if (kind != JobKind::kWarehouseToDoc) {
      fail(ErrorCode::kInvalidArgument, "a temp table is only used by wh2doc");
    }
    checkIdentifier(tempTableName, "table");
  }
}

Object rowToObject(std::span<const Column> schema, const Row& row) {
  Object obj;
  for (size_t i = 0; i < schema.size(); ++i) {
    if (row[i].isNull()) {
      continue;
    }
    if (schema[i].name == "_id") {
      obj.set("_id", DocValue(idText(row[i])));
    } else {
      obj.set(schema[i].name, row[i]);
    }
  }
  return obj;
}

RecordBatch documentsToBatch(
    std::span<const Document> docs,
    const InferredSchema& schema) {
  std::vector<Column> columns;
  for (const auto& flat : flattenSchema(schema)) {
    auto [name, type] = parseFlattenedColumn(flat);
    columns.push_back({std::move(name), type});
  }
  RecordBatch batch = RecordBatch::empty(std::move(columns));
  for (auto& column : batch.columns) {
    column.reserve(docs.size());
  }
  for (const auto& doc : docs) {
    for (size_t i = 0; i < schema.columns.size(); ++i) {
      const auto& spec = schema.columns[i];
      const DocValue* value = doc.root().find(spec.name);
      batch.columns[i].push_back(
          value ? toColumnValue(*value, spec.type) : DocValue());
    }
  }
  batch.rowCount = docs.size();
  return batch;
}

// ---------------------------------------------------------------------------
// JobRunner
// ---------------------------------------------------------------------------

JobRunner::JobRunner(Session& session, DocStore& docs) : session_(session), docs_(docs) {}

TransferReport JobRunner::run(const JobSpec& spec) {
  spec.validate();
  auto start = std::chrono::steady_clock::now();
  TransferReport report;
  switch (spec.kind) {
    case JobKind::kDocToWarehouse:
      report = importDocToWarehouse(spec);
      break;
    case JobKind::kWarehouseToDoc:
      report = importWarehouseToDoc(spec);
      break;
    case JobKind::kDocToSession:
      report = importDocToSession(spec);
      break;
    case JobKind::kSessionToDoc:
      report = importSessionToDoc(spec);
      break;
    case JobKind::kSessionToWarehouse:
      report = importSessionToWarehouse(spec);
      break;
    case JobKind::kWarehouseToSession:
      report = importWarehouseToSession(spec);
      break;
  }
  report.wallTimeMs = millisSince(start);
  return report;
}

TransferReport JobRunner::saveDocuments(
    const RecordBatch& batch,
    const CollectionRef& dest,
    SaveMode mode) {
  TransferReport report;
  report.serializationSteps = 1;
  if (docs_.hasCollection(dest) && docs_.scan(dest).next().has_value()) {
    switch (mode) {
      case SaveMode::kErrorIfExists:
        fail(
            ErrorCode::kExists,
            fmt::format("collection '{}' is not empty", dest.toString()));
      case SaveMode::kIgnore:
        return report;
      case SaveMode::kOverwrite:
        docs_.dropCollection(dest);
        break;
      case SaveMode::kAppend:
        break;
    }
  }
  std::vector<Object> objects;
  objects.reserve(batch.rowCount);
  for (const auto& row : batch.rows()) {
    objects.push_back(rowToObject(batch.schema, row));
  }
  report.rowsMoved = static_cast<int64_t>(docs_.insertMany(dest, objects));
  return report;
}

TransferReport JobRunner::importDocToWarehouse(const JobSpec& spec) {
  auto docs = scanCollection(docs_, spec.source);
  if (spec.dropTable) {
    session_.dropTable(spec.dest, /*ifExists=*/true, /*purge=*/true);
  }
  InferredSchema schema = removeNullSchema(inferSchema(docs));
  auto builder = session_.createTable(spec.dest).ifNotExists();
  for (const auto& flat : flattenSchema(schema)) {
    auto [name, type] = parseFlattenedColumn(flat);
    builder.column(std::move(name), type);
  }
  builder.create();

  RecordBatch batch = documentsToBatch(docs, schema);
  TransferReport report = session_.writeDataset(batch, spec.dest, spec.mode);
  report.inferencePasses = 1;
  // Crossing from the document model into columns.
  report.serializationSteps += 1;
  return report;
}

TransferReport JobRunner::importWarehouseToDoc(const JobSpec& spec) {
  TableRef source = session_.resolve(spec.source);
  session_.warehouse().tableMeta(source.database, source.name);
  CollectionRef dest = CollectionRef::parse(spec.dest);

  std::string temp = spec.tempTableName;
  if (temp.empty()) {
    temp = "__ncwc_tmp_" + newUuid();
    std::replace(temp.begin(), temp.end(), '-', '_');
  }
  auto dropTemp = [&] { session_.sessionCatalog().dropTable("default", temp, true); };

  TransferReport report;
  try {
    JobSpec toSession{
        JobKind::kWarehouseToSession,
        source.toString(),
        "default." + temp,
        SaveMode::kErrorIfExists,
        false,
        {}};
    TransferReport staged = importWarehouseToSession(toSession);
    RecordBatch batch = session_.sessionRead("default", temp);
    TransferReport saved = saveDocuments(batch, dest, spec.mode);
    report.splitCount = staged.splitCount;
    report.serializationSteps = staged.serializationSteps + saved.serializationSteps;
    report.rowsMoved = saved.rowsMoved;
  } catch (...) {
    dropTemp();
    throw;
  }
  dropTemp();
  // Column types mapped back onto document values.
  report.inferencePasses = 1;
  report.serializationSteps += 1;
  return report;
}

TransferReport JobRunner::importDocToSession(const JobSpec& spec) {
  auto docs = scanCollection(docs_, spec.source);
  TableRef dest = sessionRef(spec.dest);
  if (spec.dropTable) {
    session_.sessionCatalog().dropTable(dest.database, dest.name, true);
  }
  InferredSchema schema = removeNullSchema(inferSchema(docs));
  RecordBatch batch = documentsToBatch(docs, schema);
  TransferReport report = session_.saveAsTable(batch, dest.database, dest.name, spec.mode);
  report.inferencePasses = 1;
  report.serializationSteps += 1;
  return report;
}

TransferReport JobRunner::importSessionToDoc(const JobSpec& spec) {
  TableRef source = sessionRef(spec.source);
  RecordBatch batch = session_.sessionRead(source.database, source.name);
  TransferReport report = saveDocuments(batch, CollectionRef::parse(spec.dest), spec.mode);
  report.inferencePasses = 1;
  report.serializationSteps += 1;
  return report;
}

TransferReport JobRunner::importSessionToWarehouse(const JobSpec& spec) {
  TableRef source = sessionRef(spec.source);
  RecordBatch batch = session_.sessionRead(source.database, source.name);
  TableRef dest = session_.resolve(spec.dest);
  if (spec.dropTable) {
    session_.warehouse().dropTable(dest.database, dest.name, true, true);
  }
  if (!session_.warehouse().hasTable(dest.database, dest.name)) {
    auto builder = session_.createTable(dest.toString()).ifNotExists();
    for (const auto& column : batch.schema) {
      builder.column(column.name, column.type);
    }
    builder.create();
  }
  TransferReport report = session_.writeDataset(batch, dest.toString(), spec.mode);
  report.inferencePasses = 0;
  return report;
}

TransferReport JobRunner::importWarehouseToSession(const JobSpec& spec) {
  TableRef source = session_.resolve(spec.source);
  session_.warehouse().tableMeta(source.database, source.name);
  TableRef dest = sessionRef(spec.dest);
  if (spec.dropTable) {
    session_.sessionCatalog().dropTable(dest.database, dest.name, true);
  }
  TransferReport read;
  RecordBatch batch = session_.run(
      hql::SelectAll{hql::QualifiedName{source.database, source.name}, std::nullopt},
      &read);
  TransferReport report = session_.saveAsTable(batch, dest.database, dest.name, spec.mode);
  report.splitCount = read.splitCount;
  report.inferencePasses = 0;
  return report;
}

// ---------------------------------------------------------------------------
// Benchmark
// ---------------------------------------------------------------------------

std::vector<Object> syntheticDocuments(int64_t count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int32_t> small(0, 1000);
  std::uniform_real_distribution<double> real(0.0, 10000.0);
  static constexpr std::string_view kWords[] = {
      "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta"};
  std::vector<Object> docs;
  docs.reserve(static_cast<size_t>(count));
  for (int64_t i = 0; i < count; ++i) {
    Array tags;
    for (int t = small(rng) % 4; t > 0; --t) {
      tags.emplace_back(std::string(kWords[small(rng) % 8]));
    }
    Array scores;
    for (int t = small(rng) % 3; t > 0; --t) {
      scores.emplace_back(small(rng));
    }
    Object doc{
        {"_id", DocValue(fmt::format("doc-{:09d}", i))},
        {"seq", DocValue(static_cast<int32_t>(i))},
        {"serial", DocValue(int64_t{5'000'000'000} + i)},
        {"amount", DocValue(real(rng))},
        {"name", DocValue(std::string(kWords[i % 8]) + "-" + std::to_string(i))},
        {"active", DocValue(i % 3 == 0)},
        {"created", DocValue(Timestamp{1'600'000'000'000 + i * 1000})},
        {"tags", DocValue(std::move(tags))},
        {"scores", DocValue(std::move(scores))},
        {"unused", DocValue()},
        {"sometimes", i % 2 == 0 ? DocValue() : DocValue(small(rng))},
    };
    docs.push_back(std::move(doc));
  }
  return docs;
}

BenchmarkResult runBenchmark(
    int64_t rows,
    int parallelism,
    const fs::path& scratch) {
  if (rows < 0) {
    fail(ErrorCode::kInvalidArgument, "row count must be >= 0");
  }
  if (fs::exists(scratch) && !fs::is_empty(scratch)) {
    fail(
        ErrorCode::kInvalidArgument,
        fmt::format("scratch directory '{}' is not empty", scratch.string()));
  }
  SessionConfig config = SessionConfig::underDirectory(scratch);
  config.parallelism = parallelism;
  Session session = Session::build(config);
  DocStore store(config.docstoreRoot);
  {
    auto docs = syntheticDocuments(rows);
    store.insertMany(CollectionRef{"bench", "source"}, docs);
  }

  const JobSpec specs[] = {
      {JobKind::kDocToWarehouse, "bench.source", "bench_wh", SaveMode::kOverwrite, true, {}},
      {JobKind::kWarehouseToDoc, "bench_wh", "bench.from_wh", SaveMode::kOverwrite, false, {}},
      {JobKind::kDocToSession, "bench.source", "bench_sess", SaveMode::kOverwrite, false, {}},
      {JobKind::kSessionToDoc, "bench_sess", "bench.from_sess", SaveMode::kOverwrite, false, {}},
      {JobKind::kSessionToWarehouse, "bench_sess", "bench_wh2", SaveMode::kOverwrite, false, {}},
      {JobKind::kWarehouseToSession, "bench_wh", "bench_sess2", SaveMode::kOverwrite, false, {}},
  };

  BenchmarkResult result;
  result.rows = rows;
  result.parallelism = parallelism;
  JobRunner runner(session, store);
  for (const auto& spec : specs) {
    TransferReport report = runner.run(spec);
    result.totalMs += report.wallTimeMs;
    result.jobs.push_back({spec.kind, report});
  }
  return result;
}

std::string formatBenchmarkTable(const BenchmarkResult& result) {
  std::string out = fmt::format(
      "{:<24}{:>10}{:>12}{:>8}{:>11}{:>15}{:>9}\n",
      "job",
      "rows",
      "time_ms",
      "splits",
      "inference",
      "serialization",
      "staging");
  for (const auto& row : result.jobs) {
    const auto& r = row.report;
    out += fmt::format(
        "{:<24}{:>10}{:>12.1f}{:>8}{:>11}{:>15}{:>9}\n",
        jobKindLabel(row.kind),
        r.rowsMoved,
        r.wallTimeMs,
        r.splitCount,
        r.inferencePasses,
        r.serializationSteps,
        r.stagingFiles);
  }
  out += fmt::format("{:<24}{:>10}{:>12.1f}\n", "total", "", result.totalMs);
  return out;
}

std::string benchmarkJson(const BenchmarkResult& result) {
  Array jobs;
  for (const auto& row : result.jobs) {
    const auto& r = row.report;
    jobs.emplace_back(Object{
        {"job", DocValue(std::string(jobKindName(row.kind)))},
        {"rows_moved", integerValue(r.rowsMoved)},
        {"split_count", integerValue(r.splitCount)},
        {"inference_passes", integerValue(r.inferencePasses)},
        {"serialization_steps", integerValue(r.serializationSteps)},
        {"staging_files", integerValue(r.stagingFiles)},
        {"wall_time_ms", DocValue(r.wallTimeMs)},
    });
  }
  return toCanonicalJson(DocValue(Object{
      {"rows", integerValue(result.rows)},
      {"parallelism", DocValue(static_cast<int32_t>(result.parallelism))},
      {"total_ms", DocValue(result.totalMs)},
      {"jobs", DocValue(std::move(jobs))},
  }));
}

} // namespace ncwc
