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

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "ncwc/warehouse.h"
#include "support/test_support.h"

namespace ncwc {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;
using testing::ValueGenerator;
using K = WarehouseType::Kind;

TableMeta simpleMeta(std::string name = "t") {
  TableMeta meta;
  meta.database = "default";
  meta.name = std::move(name);
  meta.columns = {{"id", WarehouseType::of(K::kBigint)}, {"v", WarehouseType::of(K::kString)}};
  return meta;
}

Row row(int64_t id, std::string v) {
  return Row{DocValue(id), DocValue(std::move(v))};
}

std::vector<std::string> readLines(const fs::path& file) {
  std::ifstream in(file);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

// Independent replay: visibility from the raw log text, rows from the raw
// segment files.
std::vector<Row> oracleScan(const fs::path& tableDir, size_t logLines = SIZE_MAX) {
  auto lines = readLines(tableDir / "_txn.log");
  std::set<int64_t> begun;
  std::set<int64_t> ended;
  std::vector<std::string> visible;
  for (size_t i = 0; i < lines.size() && i < logLines; ++i) {
    auto rec = nlohmann::json::parse(lines[i]);
    int64_t txn = rec["txn_id"].get<int64_t>();
    std::string state = rec["state"].get<std::string>();
    if (state == "BEGIN") {
      begun.insert(txn);
      continue;
    }
    if (!begun.count(txn) || ended.count(txn)) {
      continue;
    }
    ended.insert(txn);
    if (state != "COMMIT") {
      continue;
    }
    if (rec["op"] == "OVERWRITE") {
      visible.clear();
    }
    for (const auto& seg : rec["segments"]) {
      visible.push_back(seg["path"].get<std::string>());
    }
  }
  std::vector<Row> rows;
  for (const auto& path : visible) {
    auto segLines = readLines(tableDir / path);
    EXPECT_FALSE(segLines.empty());
    EXPECT_EQ(segLines[0].rfind("NCWC1 ", 0), 0u);
    for (size_t i = 1; i < segLines.size(); ++i) {
      DocValue arr = parseJson(segLines[i]);
      rows.push_back(arr.as<Array>());
    }
  }
  return rows;
}

uint64_t oracleFnv(const std::vector<uint8_t>& bytes) {
  uint64_t h = 14695981039346656037ULL;
  for (auto b : bytes) {
    h = (h ^ b) * 1099511628211ULL;
  }
  return h;
}

class WarehouseTest : public ::testing::Test {
 protected:
  TempDir dir;
  Warehouse wh{dir.path()};

  void appendRows(const TableMeta& meta, std::vector<Row> rows, SaveMode mode = SaveMode::kAppend) {
    auto txn = wh.begin(meta.database, meta.name);
    wh.writeRows(txn, rows, mode);
    wh.commit(txn);
  }
  fs::path tdir(const TableMeta& meta) {
    return wh.tableDir(meta.database, meta.name);
  }
};

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

TEST_F(WarehouseTest, FreshWarehouseHasDefault) {
  EXPECT_EQ(wh.showDatabases(), std::vector<std::string>{"default"});
  EXPECT_TRUE(wh.showTables("default").empty());
  EXPECT_NCWC_ERROR(wh.showTables("nope"), ErrorCode::kNoDatabase);
}

TEST_F(WarehouseTest, CreateDatabase) {
  EXPECT_TRUE(wh.createDatabase("sales", false));
  EXPECT_FALSE(wh.createDatabase("sales", true));
  EXPECT_NCWC_ERROR(wh.createDatabase("sales", false), ErrorCode::kExists);
  EXPECT_EQ(wh.showDatabases(), (std::vector<std::string>{"default", "sales"}));
  EXPECT_NCWC_ERROR(wh.createDatabase("bad-name", false), ErrorCode::kInvalidArgument);
}

TEST_F(WarehouseTest, DropDatabase) {
  wh.createDatabase("d", false);
  auto meta = simpleMeta();
  meta.database = "d";
  wh.createTable(meta, false);
  EXPECT_NCWC_ERROR(wh.dropDatabase("d", false, false), ErrorCode::kNotEmpty);
  EXPECT_TRUE(wh.dropDatabase("d", false, true));
  EXPECT_FALSE(wh.hasDatabase("d"));
  EXPECT_FALSE(fs::exists(dir / "d"));
  EXPECT_FALSE(wh.dropDatabase("d", true, false));
  EXPECT_NCWC_ERROR(wh.dropDatabase("d", false, false), ErrorCode::kNoDatabase);
}

TEST_F(WarehouseTest, CreateTable) {
  auto meta = simpleMeta();
  EXPECT_TRUE(wh.createTable(meta, false));
  EXPECT_EQ(wh.describeTable("default", "t").size(), 2u);
  EXPECT_TRUE(fs::exists(tdir(meta) / "_meta.json"));
  EXPECT_TRUE(fs::exists(tdir(meta) / "_txn.log"));
  EXPECT_EQ(wh.showTables("default"), std::vector<std::string>{"t"});

  auto other = meta;
  other.columns.pop_back();
  EXPECT_FALSE(wh.createTable(other, true));
  EXPECT_EQ(wh.tableMeta("default", "t"), meta);
  EXPECT_NCWC_ERROR(wh.createTable(other, false), ErrorCode::kExists);

  auto missingDb = simpleMeta();
  missingDb.database = "nope";
  EXPECT_NCWC_ERROR(wh.createTable(missingDb, false), ErrorCode::kNoDatabase);
}

TEST_F(WarehouseTest, BadMeta) {
  auto meta = simpleMeta("b");
  meta.bucketSpec = BucketSpec{{"missing"}, 4};
  EXPECT_NCWC_ERROR(wh.createTable(meta, false), ErrorCode::kBadMeta);
  meta.bucketSpec = BucketSpec{{"id"}, 0};
  EXPECT_NCWC_ERROR(wh.createTable(meta, false), ErrorCode::kBadMeta);
  meta.bucketSpec = BucketSpec{{}, 2};
  EXPECT_NCWC_ERROR(wh.createTable(meta, false), ErrorCode::kBadMeta);
  meta.bucketSpec = BucketSpec{{"id"}, 2};
  meta.partitionColumns = {"id"};
  EXPECT_NCWC_ERROR(wh.createTable(meta, false), ErrorCode::kBadMeta);
  meta = simpleMeta("b");
  meta.columns.push_back(meta.columns[0]);
  EXPECT_NCWC_ERROR(wh.createTable(meta, false), ErrorCode::kBadMeta);
  meta = simpleMeta("b");
  meta.columns.clear();
  EXPECT_NCWC_ERROR(wh.createTable(meta, false), ErrorCode::kBadMeta);
  EXPECT_FALSE(wh.hasTable("default", "b"));
}

TEST_F(WarehouseTest, DropTablePurgeAndTrash) {
  auto a = simpleMeta("a");
  auto b = simpleMeta("b");
  wh.createTable(a, false);
  wh.createTable(b, false);
  appendRows(b, {row(1, "x")});
  EXPECT_TRUE(wh.dropTable("default", "a", false, true));
  EXPECT_FALSE(fs::exists(dir / "default" / "a"));
  EXPECT_TRUE(wh.dropTable("default", "b", false, false));
  EXPECT_FALSE(fs::exists(dir / "default" / "b"));
  EXPECT_TRUE(fs::exists(dir / ".trash" / "default" / "b.1" / "_txn.log"));
  EXPECT_FALSE(wh.dropTable("default", "b", true, true));
  EXPECT_NCWC_ERROR(wh.dropTable("default", "b", false, true), ErrorCode::kNoTable);
  EXPECT_TRUE(wh.showTables("default").empty());
}

TEST_F(WarehouseTest, Describe) {
  TableMeta meta;
  meta.database = "default";
  meta.name = "p";
  meta.columns = {{"x", WarehouseType::of(K::kBigint)}, {"day", WarehouseType::of(K::kString)}};
  meta.partitionColumns = {"day"};
  wh.createTable(meta, false);
  EXPECT_EQ(
      wh.describeTable("default", "p"),
      (std::vector<DescribeRow>{{"x", "BIGINT", false}, {"day", "STRING", true}}));
  EXPECT_NCWC_ERROR(wh.describeTable("default", "missing"), ErrorCode::kNoTable);
}

TEST_F(WarehouseTest, MetaJsonRoundTrip) {
  TableMeta meta;
  meta.database = "default";
  meta.name = "m";
  meta.columns = {
      {"a", WarehouseType::decimal(10, 2)},
      {"b", WarehouseType::fixedChar(4)},
      {"c", WarehouseType::of(K::kTimestamp)}};
  meta.partitionColumns = {"b"};
  meta.bucketSpec = BucketSpec{{"a", "c"}, 3};
  EXPECT_EQ(TableMeta::fromJson(meta.toJson()), meta);
}

// ---------------------------------------------------------------------------
// Buckets and partitions
// ---------------------------------------------------------------------------

TEST(HashTest, FnvVectors) {
  auto fnv = [](std::string_view s) {
    return fnv1a64(std::span(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
  };
  EXPECT_EQ(fnv(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv("foobar"), 0x85944171f73967e8ULL);
}

TEST(BucketTest, OneBucketAlwaysZero) {
  auto meta = simpleMeta();
  meta.bucketSpec = BucketSpec{{"id"}, 1};
  for (int64_t i = 0; i < 100; ++i) {
    EXPECT_EQ(assignBucket(row(i, "x"), meta), 0);
  }
}

TEST(BucketTest, DependsOnBucketColumnsOnly) {
  auto meta = simpleMeta();
  meta.bucketSpec = BucketSpec{{"id"}, 8};
  for (int64_t i = 0; i < 100; ++i) {
    EXPECT_EQ(assignBucket(row(i, "x"), meta), assignBucket(row(i, "y"), meta));
  }
  EXPECT_NCWC_ERROR(assignBucket(row(1, "x"), simpleMeta()), ErrorCode::kNoBucketSpec);
}

TEST(BucketTest, MatchesIndependentHash) {
  auto meta = simpleMeta();
  meta.bucketSpec = BucketSpec{{"v", "id"}, 7};
  ValueGenerator gen(8);
  for (int i = 0; i < 500; ++i) {
    Row r = row(static_cast<int64_t>(gen.rng()()), gen.text());
    std::vector<uint8_t> key = canonicalEncode(r[1]);
    auto idBytes = canonicalEncode(r[0]);
    key.insert(key.end(), idBytes.begin(), idBytes.end());
    EXPECT_EQ(assignBucket(r, meta), static_cast<int>(oracleFnv(key) % 7));
  }
}

TEST_F(WarehouseTest, SegmentsRespectBucketAndPartition) {
  TableMeta meta;
  meta.database = "default";
  meta.name = "bp";
  meta.columns = {
      {"id", WarehouseType::of(K::kInt)},
      {"region", WarehouseType::of(K::kString)},
      {"v", WarehouseType::of(K::kDouble)}};
  meta.partitionColumns = {"region"};
  meta.bucketSpec = BucketSpec{{"id"}, 4};
  wh.createTable(meta, false);
  std::vector<Row> rows;
  const char* regions[] = {"eu", "us", "a/b c"};
  for (int i = 0; i < 300; ++i) {
    rows.push_back(Row{DocValue(i), DocValue(regions[i % 3]), DocValue(i * 0.5)});
  }
  appendRows(meta, rows);
  auto state = wh.logState("default", "bp");
  EXPECT_LE(state.visible.size(), 12u);
  int64_t total = 0;
  for (const auto& seg : state.visible) {
    auto segRows = wh.readSegment("default", "bp", seg);
    EXPECT_EQ(static_cast<int64_t>(segRows.size()), seg.rows);
    EXPECT_GE(seg.rows, 1);
    EXPECT_TRUE(fs::exists(tdir(meta) / seg.path));
    EXPECT_EQ(fs::path(seg.path).parent_path(), partitionPath(seg.partitionKey));
    for (const auto& r : segRows) {
      EXPECT_EQ(assignBucket(r, meta), seg.bucket);
      EXPECT_EQ(partitionKeyOf(r, meta), seg.partitionKey);
    }
    total += seg.rows;
  }
  EXPECT_EQ(total, 300);
}

TEST(PartitionTest, PathIsPercentEncoded) {
  PartitionKey key{{"region", "\"a/b\""}};
  EXPECT_EQ(partitionPath(key), fs::path("region=%22a%2Fb%22"));
}

// ---------------------------------------------------------------------------
// Writes and SaveMode
// ---------------------------------------------------------------------------

TEST_F(WarehouseTest, AppendTwice) {
  auto meta = simpleMeta();
  wh.createTable(meta, false);
  appendRows(meta, {row(1, "a"), row(2, "b")});
  appendRows(meta, {row(3, "c"), row(4, "d")});
  EXPECT_EQ(wh.scanTable("default", "t").size(), 4u);
  EXPECT_EQ(wh.visibleRows("default", "t"), 4);
}

TEST_F(WarehouseTest, OverwriteAfterAppend) {
  auto meta = simpleMeta();
  wh.createTable(meta, false);
  appendRows(meta, {row(1, "a"), row(2, "b")});
  appendRows(meta, {row(9, "z")}, SaveMode::kOverwrite);
  EXPECT_EQ(wh.scanTable("default", "t"), std::vector<Row>{row(9, "z")});
}

TEST_F(WarehouseTest, ErrorIfExistsOnNonEmpty) {
  auto meta = simpleMeta();
  wh.createTable(meta, false);
  appendRows(meta, {row(1, "a")});
  auto before = wh.scanTable("default", "t");
  {
    auto txn = wh.begin("default", "t");
    std::vector<Row> rows{row(2, "b")};
    EXPECT_NCWC_ERROR(wh.writeRows(txn, rows, SaveMode::kErrorIfExists), ErrorCode::kExists);
  }
  EXPECT_EQ(wh.scanTable("default", "t"), before);
  EXPECT_TRUE(wh.logState("default", "t").openTxns.empty());
}

TEST_F(WarehouseTest, IgnoreOnNonEmptyIsNoOp) {
  auto meta = simpleMeta();
  wh.createTable(meta, false);
  appendRows(meta, {row(1, "a")});
  auto before = wh.scanTable("default", "t");
  appendRows(meta, {row(2, "b")}, SaveMode::kIgnore);
  EXPECT_EQ(wh.scanTable("default", "t"), before);
}

TEST_F(WarehouseTest, IncompatibleValueIsTypeError) {
  auto meta = simpleMeta();
  wh.createTable(meta, false);
  auto txn = wh.begin("default", "t");
  std::vector<Row> rows{Row{DocValue("notanumber"), DocValue("v")}};
  EXPECT_NCWC_ERROR(wh.writeRows(txn, rows, SaveMode::kAppend), ErrorCode::kType);
  std::vector<Row> shortRow{Row{DocValue(int64_t{1})}};
  EXPECT_NCWC_ERROR(wh.writeRows(txn, shortRow, SaveMode::kAppend), ErrorCode::kType);
  wh.abort(txn);
}

TEST(CoerceTest, Rules) {
  auto t = [](K k) { return WarehouseType::of(k); };
  EXPECT_EQ(coerceToColumn(DocValue(int64_t{5}), t(K::kInt)), DocValue(5));
  EXPECT_EQ(coerceToColumn(DocValue(5), t(K::kBigint)), DocValue(int64_t{5}));
  EXPECT_EQ(coerceToColumn(DocValue(5), t(K::kDouble)), DocValue(5.0));
  EXPECT_EQ(coerceToColumn(DocValue(), t(K::kBoolean)), DocValue());
  EXPECT_EQ(coerceToColumn(DocValue(0.1), t(K::kFloat)), DocValue(double(0.1f)));
  EXPECT_NCWC_ERROR(coerceToColumn(DocValue(200), t(K::kTinyint)), ErrorCode::kType);
  EXPECT_NCWC_ERROR(coerceToColumn(DocValue(40000), t(K::kSmallint)), ErrorCode::kType);
  EXPECT_NCWC_ERROR(
      coerceToColumn(DocValue(int64_t{1} << 40), t(K::kInt)), ErrorCode::kType);
  EXPECT_NCWC_ERROR(coerceToColumn(DocValue(2.5), t(K::kBigint)), ErrorCode::kType);
  EXPECT_NCWC_ERROR(coerceToColumn(DocValue(1), t(K::kString)), ErrorCode::kType);
  EXPECT_EQ(coerceToColumn(DocValue("日本"), WarehouseType::fixedChar(2)), DocValue("日本"));
  EXPECT_NCWC_ERROR(
      coerceToColumn(DocValue("abc"), WarehouseType::fixedChar(2)), ErrorCode::kType);
}

// ---------------------------------------------------------------------------
// Transactions and visibility
// ---------------------------------------------------------------------------

TEST_F(WarehouseTest, UncommittedIsInvisible) {
  auto meta = simpleMeta();
  wh.createTable(meta, false);
  auto txn = wh.begin("default", "t");
  std::vector<Row> rows{row(1, "a")};
  wh.writeRows(txn, rows, SaveMode::kAppend);
  EXPECT_TRUE(wh.scanTable("default", "t").empty());
  EXPECT_NCWC_ERROR(wh.begin("default", "t"), ErrorCode::kTxnOpen);
  wh.commit(txn);
  EXPECT_EQ(wh.scanTable("default", "t").size(), 1u);
  EXPECT_NCWC_ERROR(wh.commit(txn), ErrorCode::kNoTxn);
}

TEST_F(WarehouseTest, AbortRemovesFiles) {
  auto meta = simpleMeta();
  wh.createTable(meta, false);
  auto txn = wh.begin("default", "t");
  std::vector<Row> rows{row(1, "a"), row(2, "b")};
  auto segs = wh.writeRows(txn, rows, SaveMode::kAppend);
  ASSERT_FALSE(segs.empty());
  wh.abort(txn);
  for (const auto& s : segs) {
    EXPECT_FALSE(fs::exists(tdir(meta) / s.path));
  }
  EXPECT_TRUE(wh.scanTable("default", "t").empty());
  auto log = wh.readLog("default", "t");
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(log[1].state, TxnState::kAbort);
}

TEST_F(WarehouseTest, DestructorAbortsOpenTransaction) {
  auto meta = simpleMeta();
  wh.createTable(meta, false);
  {
    auto txn = wh.begin("default", "t");
    std::vector<Row> rows{row(1, "a")};
    wh.writeRows(txn, rows, SaveMode::kAppend);
  }
  EXPECT_TRUE(wh.logState("default", "t").openTxns.empty());
  EXPECT_TRUE(wh.scanTable("default", "t").empty());
}

TEST_F(WarehouseTest, BatchIdIsRecorded) {
  auto meta = simpleMeta();
  wh.createTable(meta, false);
  auto txn = wh.begin("default", "t", 7);
  wh.commit(txn);
  auto log = wh.readLog("default", "t");
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(log[0].batchId, 7);
  EXPECT_EQ(wh.logState("default", "t").lastCommittedBatchId, 7);
}

TEST_F(WarehouseTest, RandomHistoriesMatchLogReplayOracle) {
  ValueGenerator gen(77);
  for (int trial = 0; trial < 10; ++trial) {
    auto meta = simpleMeta("r" + std::to_string(trial));
    if (trial % 2) {
      meta.bucketSpec = BucketSpec{{"id"}, 3};
    }
    wh.createTable(meta, false);
    int64_t next = 0;
    for (int step = 0; step < 12; ++step) {
      auto txn = wh.begin(meta.database, meta.name);
      std::vector<Row> rows;
      for (int n = gen.uniform(0, 6); n > 0; --n) {
        rows.push_back(row(next++, gen.text(4)));
      }
      SaveMode mode = gen.uniform(0, 4) == 0 ? SaveMode::kOverwrite : SaveMode::kAppend;
      wh.writeRows(txn, rows, mode);
      if (gen.uniform(0, 3) == 0) {
        wh.abort(txn);
      } else {
        wh.commit(txn);
      }
      ASSERT_EQ(wh.scanTable(meta.database, meta.name), oracleScan(tdir(meta)));
    }
  }
}

TEST_F(WarehouseTest, LogTruncationNeverExposesPartialTransactions) {
  auto meta = simpleMeta();
  meta.bucketSpec = BucketSpec{{"id"}, 2};
  wh.createTable(meta, false);
  std::vector<size_t> committedSizes{0};
  for (int b = 0; b < 5; ++b) {
    auto txn = wh.begin("default", "t");
    std::vector<Row> rows;
    for (int i = 0; i <= b; ++i) {
      rows.push_back(row(b * 10 + i, "x"));
    }
    wh.writeRows(txn, rows, SaveMode::kAppend);
    if (b == 2) {
      wh.abort(txn);
    } else {
      wh.commit(txn);
      committedSizes.push_back(committedSizes.back() + rows.size());
    }
  }
  auto lines = readLines(tdir(meta) / "_txn.log");
  for (size_t keep = 0; keep <= lines.size(); ++keep) {
    TempDir copy;
    fs::path root = copy / "wh";
    testing::copyTree(dir.path(), root);
    {
      std::ofstream out(root / "default/t/_txn.log", std::ios::trunc);
      for (size_t i = 0; i < keep; ++i) {
        out << lines[i] << "\n";
      }
    }
    Warehouse recovered(root);
    recovered.recoverTable("default", "t");
    auto scanned = recovered.scanTable("default", "t");
    EXPECT_NE(
        std::find(committedSizes.begin(), committedSizes.end(), scanned.size()),
        committedSizes.end())
        << keep;
    EXPECT_EQ(scanned, oracleScan(root / "default/t", keep));
    EXPECT_TRUE(recovered.logState("default", "t").openTxns.empty());
    // Orphan segment files are gone after recovery.
    std::set<std::string> referenced;
    for (const auto& s : recovered.logState("default", "t").visible) {
      referenced.insert(s.path);
    }
    for (const auto& entry : fs::recursive_directory_iterator(root / "default/t")) {
      if (entry.path().extension() == ".ncwc") {
        auto rel = fs::relative(entry.path(), root / "default/t").string();
        EXPECT_TRUE(referenced.count(rel)) << rel;
      }
    }
  }
}

TEST_F(WarehouseTest, TornLogTailIsIgnored) {
  auto meta = simpleMeta();
  wh.createTable(meta, false);
  appendRows(meta, {row(1, "a")});
  {
    std::ofstream out(tdir(meta) / "_txn.log", std::ios::app);
    out << R"({"op":"APPEND","state":"BEG)";
  }
  Warehouse reopened(dir.path());
  EXPECT_EQ(reopened.scanTable("default", "t").size(), 1u);
  appendRows(meta, {row(2, "b")});
  EXPECT_EQ(reopened.scanTable("default", "t").size(), 2u);
}

TEST(ReplayLogTest, IgnoresTerminalWithoutBegin) {
  SegmentInfo seg{"s1", {}, 0, 3, "0-s1.ncwc"};
  std::vector<TxnRecord> records{
      {1, TxnState::kCommit, TxnOp::kAppend, std::nullopt, {seg}},
      {2, TxnState::kBegin, TxnOp::kAppend, 4, {}},
  };
  auto state = replayLog(records);
  EXPECT_TRUE(state.visible.empty());
  EXPECT_EQ(state.openTxns, std::vector<int64_t>{2});
  EXPECT_EQ(state.maxTxnId, 2);
  EXPECT_EQ(state.lastCommittedBatchId, -1);
}

TEST(TxnRecordTest, JsonRoundTrip) {
  SegmentInfo seg{"s1", {{"day", "\"mon\""}}, 2, 3, "day=%22mon%22/2-s1.ncwc"};
  TxnRecord r{5, TxnState::kCommit, TxnOp::kOverwrite, 9, {seg}};
  EXPECT_EQ(TxnRecord::fromJson(r.toJson()), r);
}

TEST(SegmentFormatTest, EncodeDecode) {
  std::vector<Column> cols{{"a", WarehouseType::of(K::kInt)}, {"b", WarehouseType::of(K::kBinary)}};
  std::vector<Row> rows{
      Row{DocValue(1), DocValue(Binary{1, 2})}, Row{DocValue(), DocValue(Binary{})}};
  std::string text = segment_format::encode(cols, rows);
  EXPECT_EQ(text.rfind("NCWC1 [{\"name\":\"a\",\"type\":\"INT\"}", 0), 0u);
  auto decoded = segment_format::decode(text);
  EXPECT_EQ(decoded.columns, cols);
  EXPECT_EQ(decoded.rows, rows);
  EXPECT_ANY_THROW(segment_format::decode("NCWC2 []\n"));
}

} // namespace
} // namespace ncwc
