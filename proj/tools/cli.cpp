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

#include "cli.h"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>

#include <fmt/format.h>

#include "ncwc/docstore.h"
#include "ncwc/error.h"
#include "ncwc/identifier.h"
#include "ncwc/jobs.h"
#include "ncwc/session.h"
#include "ncwc/streaming.h"

namespace ncwc::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDefaultRoot = ".ncwc";
constexpr const char* kConfigEnv = "NCWC_CONFIG";

std::string cellText(const DocValue& value) {
  switch (value.kind()) {
    case DocKind::kNull:
      return "NULL";
    case DocKind::kBoolean:
      return value.as<bool>() ? "true" : "false";
    case DocKind::kInt32:
      return std::to_string(value.as<int32_t>());
    case DocKind::kInt64:
      return std::to_string(value.as<int64_t>());
    case DocKind::kText:
      return value.as<std::string>();
    default:
      return toCanonicalJson(value);
  }
}

std::vector<Object> readJsonLines(const fs::path& file) {
  std::ifstream in(file);
  if (!in) {
    fail(ErrorCode::kIo, fmt::format("cannot open '{}'", file.string()));
  }
  std::vector<Object> docs;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    DocValue value = parseJson(line);
    if (value.kind() != DocKind::kObject) {
      fail(
          ErrorCode::kType,
          fmt::format("{}:{}: expected a JSON object", file.string(), lineNo));
    }
    docs.push_back(value.as<Object>());
  }
  return docs;
}

Row objectToRow(const Object& obj, const TableMeta& meta) {
  Row row;
  row.reserve(meta.columns.size());
  for (const auto& column : meta.columns) {
    const DocValue* value = obj.find(column.name);
    if (!value) {
      row.emplace_back();
    } else if (value->kind() == DocKind::kArray || value->kind() == DocKind::kObject) {
      row.emplace_back(toCanonicalJson(*value));
    } else {
      row.push_back(*value);
    }
  }
  return row;
}

struct Options {
  std::string configFile;
  std::string root;
  int parallelism = 0;
  bool json = false;

  std::string db;
  std::string collection;
  std::string file;

  std::string sql;

  std::string job;
  std::string source;
  std::string dest;
  std::string mode = "errorifexists";
  bool dropTable = false;
  std::string tempTable;

  std::string table;
  int64_t batchSize = 1000;
  int64_t startBatch = 0;

  int64_t rows = 1000;
  std::string scratch;

  bool tables = false;
  bool databases = false;
  bool collections = false;
};

SessionConfig resolveConfig(const Options& opts) {
  SessionConfig config = SessionConfig::underDirectory(kDefaultRoot);
  if (!opts.configFile.empty()) {
    config.loadFile(opts.configFile);
  } else if (const char* env = std::getenv(kConfigEnv); env && *env) {
    config.loadFile(env);
  }
  if (!opts.root.empty()) {
    SessionConfig rooted = SessionConfig::underDirectory(opts.root);
    config.warehouseRoot = rooted.warehouseRoot;
    config.stagingDir = rooted.stagingDir;
    config.sessionCatalogRoot = rooted.sessionCatalogRoot;
    config.docstoreRoot = rooted.docstoreRoot;
  }
  if (opts.parallelism > 0) {
    config.parallelism = opts.parallelism;
  }
  config.validate();
  return config;
}

void printBatch(const RecordBatch& batch, bool json, std::ostream& out) {
  if (json) {
    out << batchJson(batch) << "\n";
  } else {
    out << formatTable(batch);
  }
}

int runIngest(const Options& opts, std::ostream& out) {
  CollectionRef ref{opts.db, opts.collection};
  ref.validate();
  SessionConfig config = resolveConfig(opts);
  auto docs = readJsonLines(opts.file);
  DocStore store(config.docstoreRoot);
  size_t inserted = store.insertMany(ref, docs);
  if (opts.json) {
    out << toCanonicalJson(DocValue(Object{
               {"collection", DocValue(ref.toString())},
               {"inserted", integerValue(static_cast<int64_t>(inserted))}}))
        << "\n";
  } else {
    out << fmt::format("inserted {} documents into {}\n", inserted, ref.toString());
  }
  return kOk;
}

int runQuery(const Options& opts, std::ostream& out) {
  auto statement = hql::parse(opts.sql);
  Session session = Session::build(resolveConfig(opts));
  printBatch(session.run(statement), opts.json, out);
  return kOk;
}

void printReport(const TransferReport& report, bool json, std::ostream& out) {
  if (json) {
    out << report.toJson() << "\n";
    return;
  }
  out << fmt::format(
      "rows_moved {}\nsplit_count {}\ninference_passes {}\nserialization_steps {}\n"
      "staging_files {}\nwall_time_ms {:.1f}\n",
      report.rowsMoved,
      report.splitCount,
      report.inferencePasses,
      report.serializationSteps,
      report.stagingFiles,
      report.wallTimeMs);
}

int runTransfer(const Options& opts, std::ostream& out) {
  JobSpec spec;
  spec.kind = parseJobKind(opts.job);
  spec.source = opts.source;
  spec.dest = opts.dest;
  spec.mode = parseSaveMode(opts.mode);
  spec.dropTable = opts.dropTable;
  spec.tempTableName = opts.tempTable;
  spec.validate();
  SessionConfig config = resolveConfig(opts);
  Session session = Session::build(config);
  DocStore store(config.docstoreRoot);
  JobRunner runner(session, store);
  printReport(runner.run(spec), opts.json, out);
  return kOk;
}

int runStreamCommand(const Options& opts, std::ostream& out, std::ostream& err) {
  Session session = Session::build(resolveConfig(opts));
  TableRef table = session.resolve(opts.table);
  TableMeta meta = session.warehouse().tableMeta(table.database, table.name);
  std::vector<Row> rows;
  for (const auto& obj : readJsonLines(opts.source)) {
    rows.push_back(objectToRow(obj, meta));
  }
  StreamSink sink(session.warehouse(), table);
  std::vector<std::vector<Row>> groups;
  groups.push_back(std::move(rows));
  StreamResult result =
      runStream(rowSourceOf(std::move(groups)), sink, opts.batchSize, opts.startBatch);
  if (opts.json) {
    out << toCanonicalJson(DocValue(Object{
               {"committed_rows", integerValue(result.committedRows)},
               {"committed_batches", integerValue(result.committedBatches)},
               {"duplicate_batches", integerValue(result.duplicateBatches)}}))
        << "\n";
  } else {
    out << fmt::format(
        "committed_rows {}\ncommitted_batches {}\nduplicate_batches {}\n",
        result.committedRows,
        result.committedBatches,
        result.duplicateBatches);
  }
  if (result.failure) {
    err << "error: " << result.failure->what() << "\n";
    return kDomainError;
  }
  return kOk;
}

int runBench(const Options& opts, std::ostream& out) {
  int parallelism = opts.parallelism > 0 ? opts.parallelism : 2;
  fs::path scratch = opts.scratch;
  bool ownScratch = scratch.empty();
  if (ownScratch) {
    scratch = fs::temp_directory_path() / ("ncwc-bench-" + newUuid());
  }
  BenchmarkResult result;
  try {
    result = runBenchmark(opts.rows, parallelism, scratch);
  } catch (...) {
    if (ownScratch) {
      std::error_code ec;
      fs::remove_all(scratch, ec);
    }
    throw;
  }
  if (ownScratch) {
    std::error_code ec;
    fs::remove_all(scratch, ec);
  }
  if (opts.json) {
    out << benchmarkJson(result) << "\n";
  } else {
    out << formatBenchmarkTable(result);
  }
  return kOk;
}

int runShow(const Options& opts, std::ostream& out, std::ostream& err) {
  int picked = int(opts.tables) + int(opts.databases) + int(opts.collections);
  if (picked != 1) {
    err << "show: pass exactly one of --tables, --databases, --collections\n";
    return kUsageError;
  }
  if (!opts.db.empty()) {
    checkIdentifier(opts.db, "database");
  }
  SessionConfig config = resolveConfig(opts);
  RecordBatch batch;
  if (opts.collections) {
    DocStore store(config.docstoreRoot);
    std::vector<std::string> names;
    auto dbs = opts.db.empty() ? store.listDatabases() : std::vector<std::string>{opts.db};
    for (const auto& db : dbs) {
      for (const auto& coll : store.listCollections(db)) {
        names.push_back(db + "." + coll);
      }
    }
    batch = namesBatch("collection", names);
  } else {
    Session session = Session::build(config);
    if (opts.databases) {
      batch = namesBatch("database_name", session.showDatabases());
    } else {
      if (!opts.db.empty()) {
        session.setDatabase(opts.db);
      }
      batch = namesBatch("tab_name", session.showTables());
    }
  }
  printBatch(batch, opts.json, out);
  return kOk;
}

} // namespace

std::string formatTable(const RecordBatch& batch) {
  if (batch.schema.empty()) {
    return {};
  }
  size_t n = batch.schema.size();
  std::vector<std::vector<std::string>> cells(batch.rowCount, std::vector<std::string>(n));
  std::vector<size_t> width(n);
  for (size_t c = 0; c < n; ++c) {
    width[c] = batch.schema[c].name.size();
    for (size_t r = 0; r < batch.rowCount; ++r) {
      cells[r][c] = cellText(batch.columns[c][r]);
      width[c] = std::max(width[c], cells[r][c].size());
    }
  }
  auto line = [&](auto cell) {
    std::string text;
    for (size_t c = 0; c < n; ++c) {
      std::string value = cell(c);
      if (c + 1 < n) {
        value.resize(width[c], ' ');
        value += "  ";
      }
      text += value;
    }
    return text + "\n";
  };
  std::string out = line([&](size_t c) { return batch.schema[c].name; });
  out += line([&](size_t c) { return std::string(width[c], '-'); });
  for (size_t r = 0; r < batch.rowCount; ++r) {
    out += line([&](size_t c) { return cells[r][c]; });
  }
  return out;
}

std::string batchJson(const RecordBatch& batch) {
  Array columns;
  for (const auto& column : batch.schema) {
    columns.emplace_back(Object{
        {"name", DocValue(column.name)},
        {"type", DocValue(column.type.toString())}});
  }
  Array rows;
  for (size_t r = 0; r < batch.rowCount; ++r) {
    Array row;
    for (size_t c = 0; c < batch.schema.size(); ++c) {
      row.push_back(batch.columns[c][r]);
    }
    rows.emplace_back(std::move(row));
  }
  return toCanonicalJson(
      DocValue(Object{{"columns", DocValue(std::move(columns))}, {"rows", DocValue(std::move(rows))}}));
}

int cliMain(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opts;
  CLI::App app{"Moves data between a document store, a transactional warehouse and a session catalog."};
  app.name("ncwc");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", opts.configFile, "Config file (key = value lines)");
  app.add_option("--root", opts.root, "Put every store under this directory");
  app.add_option("--parallelism", opts.parallelism, "Parallel read workers")
      ->check(CLI::PositiveNumber);
  app.add_flag("--json", opts.json, "Canonical JSON output");

  auto* ingest = app.add_subcommand("ingest", "Load a JSON-lines file into a collection");
  ingest->add_option("--db", opts.db)->required();
  ingest->add_option("--collection", opts.collection)->required();
  ingest->add_option("--file", opts.file)->required();

  auto* query = app.add_subcommand("query", "Run one statement against the warehouse");
  query->add_option("--sql", opts.sql)->required();

  auto* transfer = app.add_subcommand("transfer", "Run a transfer job");
  transfer->add_option("--job", opts.job)
      ->required()
      ->check(CLI::IsMember({"doc2wh", "wh2doc", "doc2sess", "sess2doc", "sess2wh", "wh2sess"}));
  transfer->add_option("--source", opts.source)->required();
  transfer->add_option("--dest", opts.dest)->required();
  transfer->add_option("--mode", opts.mode)
      ->check(CLI::IsMember({"errorifexists", "append", "overwrite", "ignore"}));
  transfer->add_flag("--drop-table", opts.dropTable);
  transfer->add_option("--temp-table", opts.tempTable);

  auto* stream = app.add_subcommand("stream", "Stream a JSON-lines file into a table");
  stream->add_option("--source", opts.source)->required();
  stream->add_option("--table", opts.table)->required();
  stream->add_option("--batch-size", opts.batchSize)->check(CLI::PositiveNumber);
  stream->add_option("--start-batch", opts.startBatch)->check(CLI::NonNegativeNumber);

  auto* bench = app.add_subcommand("bench", "Run the six jobs on generated data");
  bench->add_option("--rows", opts.rows)->check(CLI::NonNegativeNumber);
  bench->add_option("--parallelism", opts.parallelism)->check(CLI::PositiveNumber);
  bench->add_option("--scratch", opts.scratch, "Empty directory for the benchmark stores");

  auto* show = app.add_subcommand("show", "List tables, databases or collections");
  show->add_flag("--tables", opts.tables);
  show->add_flag("--databases", opts.databases);
  show->add_flag("--collections", opts.collections);
  show->add_option("--db", opts.db);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n";
    const CLI::App* failed = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << failed->help();
    return kUsageError;
  }

  try {
    if (ingest->parsed()) {
      return runIngest(opts, out);
    }
    if (query->parsed()) {
      return runQuery(opts, out);
    }
    if (transfer->parsed()) {
      return runTransfer(opts, out);
    }
    if (stream->parsed()) {
      return runStreamCommand(opts, out, err);
    }
    if (bench->parsed()) {
      return runBench(opts, out);
    }
    return runShow(opts, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
}

} // namespace ncwc::cli
