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

#include <algorithm>
#include <numeric>

#include "ncwc/interchange.h"
#include "support/test_support.h"

namespace ncwc {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;
using testing::ValueGenerator;
using K = WarehouseType::Kind;

std::vector<Column> schema() {
  return {{"id", WarehouseType::of(K::kBigint)}, {"v", WarehouseType::of(K::kString)}};
}

Row row(int64_t id, std::string v = "x") {
  return Row{DocValue(id), DocValue(std::move(v))};
}

std::vector<Row> sorted(std::vector<Row> rows) {
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return canonicalEncode(DocValue(Array(a))) < canonicalEncode(DocValue(Array(b)));
  });
  return rows;
}

// Smallest achievable maximum split total, by exhaustive assignment.
int64_t optimalMakespan(const std::vector<int64_t>& sizes, int parts) {
  int64_t best = std::numeric_limits<int64_t>::max();
  std::vector<int64_t> load(parts, 0);
  std::function<void(size_t)> go = [&](size_t i) {
    if (i == sizes.size()) {
      best = std::min(best, *std::max_element(load.begin(), load.end()));
      return;
    }
    for (int p = 0; p < parts; ++p) {
      load[p] += sizes[i];
      if (load[p] < best) {
        go(i + 1);
      }
      load[p] -= sizes[i];
    }
  };
  go(0);
  return best;
}

class InterchangeTest : public ::testing::Test {
 protected:
  TempDir dir;
  Warehouse wh{dir / "wh"};
  TableRef ref{"default", "t"};

  TableMeta makeTable(std::optional<BucketSpec> buckets = std::nullopt) {
    TableMeta meta;
    meta.database = ref.database;
    meta.name = ref.name;
    meta.columns = schema();
    meta.bucketSpec = std::move(buckets);
    wh.createTable(meta, false);
    return meta;
  }

  // One committed segment per call.
  void addSegment(int64_t rows, int64_t& next) {
    std::vector<Row> batch;
    for (int64_t i = 0; i < rows; ++i) {
      batch.push_back(row(next++));
    }
    auto txn = wh.begin(ref.database, ref.name);
    wh.writeRows(txn, batch, SaveMode::kAppend);
    wh.commit(txn);
  }

  std::vector<Row> scan() {
    return wh.scanTable(ref.database, ref.name);
  }
};

TEST(TableRefTest, Parse) {
  EXPECT_EQ(TableRef::parse("db.t"), (TableRef{"db", "t"}));
  EXPECT_EQ(TableRef::parse("t", "cur"), (TableRef{"cur", "t"}));
  EXPECT_NCWC_ERROR(TableRef::parse("a.b.c"), ErrorCode::kInvalidArgument);
  EXPECT_NCWC_ERROR(TableRef::parse(""), ErrorCode::kInvalidArgument);
}

TEST(RecordBatchTest, RowsAndSlices) {
  std::vector<Row> rows{row(1), row(2), row(3)};
  auto batch = RecordBatch::fromRows(schema(), rows);
  EXPECT_EQ(batch.rowCount, 3u);
  EXPECT_EQ(batch.rows(), rows);
  EXPECT_EQ(batch.row(1), rows[1]);
  EXPECT_EQ(batch.slice(1, 10).rows(), (std::vector<Row>{row(2), row(3)}));
  EXPECT_EQ(batch.slice(5, 1).rowCount, 0u);
  batch.columns[0].pop_back();
  EXPECT_NCWC_ERROR(batch.validate(), ErrorCode::kInvalidArgument);
}

// ---------------------------------------------------------------------------
// Split planning
// ---------------------------------------------------------------------------

TEST_F(InterchangeTest, EqualSegmentsBalance) {
  makeTable();
  int64_t next = 0;
  for (int i = 0; i < 4; ++i) {
    addSegment(5, next);
  }
  auto splits = planSplits(wh, ref, 2);
  ASSERT_EQ(splits.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(splits[i].splitIndex, i);
    EXPECT_EQ(splits[i].segmentIds.size(), 2u);
    EXPECT_EQ(splits[i].rowTotal, 10);
  }
}

TEST_F(InterchangeTest, EmptyTableHasNoSplits) {
  makeTable();
  EXPECT_TRUE(planSplits(wh, ref, 4).empty());
  EXPECT_NCWC_ERROR(planSplits(wh, TableRef{"default", "missing"}, 2), ErrorCode::kNoTable);
  EXPECT_NCWC_ERROR(planSplits(wh, ref, 0), ErrorCode::kInvalidArgument);
}

TEST_F(InterchangeTest, GreedyRuleAndNearOptimalBalance) {
  makeTable();
  ValueGenerator gen(13);
  int64_t next = 0;
  std::vector<int64_t> sizes;
  for (int i = 0; i < 10; ++i) {
    sizes.push_back(gen.uniform(1, 30));
    addSegment(sizes.back(), next);
  }
  auto splits = planSplits(wh, ref, 3);
  ASSERT_EQ(splits.size(), 3u);

  // Replays the assignment rule over the visible order.
  auto visible = wh.logState(ref.database, ref.name).visible;
  std::vector<std::vector<std::string>> expected(3);
  std::vector<int64_t> load(3, 0);
  for (const auto& seg : visible) {
    size_t target = std::min_element(load.begin(), load.end()) - load.begin();
    expected[target].push_back(seg.id);
    load[target] += seg.rows;
  }
  int64_t maxLoad = 0;
  std::set<std::string> seen;
  for (size_t i = 0; i < splits.size(); ++i) {
    EXPECT_EQ(splits[i].segmentIds, expected[i]);
    EXPECT_EQ(splits[i].rowTotal, load[i]);
    maxLoad = std::max(maxLoad, splits[i].rowTotal);
    for (const auto& id : splits[i].segmentIds) {
      EXPECT_TRUE(seen.insert(id).second);
    }
  }
  EXPECT_EQ(seen.size(), 10u);
  EXPECT_LE(maxLoad, 2 * optimalMakespan(sizes, 3));
}

TEST_F(InterchangeTest, FewerSegmentsThanParallelism) {
  makeTable();
  int64_t next = 0;
  addSegment(2, next);
  addSegment(3, next);
  EXPECT_EQ(planSplits(wh, ref, 8).size(), 2u);
}

// ---------------------------------------------------------------------------
// Fetch and parallel read
// ---------------------------------------------------------------------------

TEST_F(InterchangeTest, FetchSplitRows) {
  makeTable();
  int64_t next = 0;
  addSegment(3, next);
  auto splits = planSplits(wh, ref, 1);
  ASSERT_EQ(splits.size(), 1u);
  auto batch = fetchSplit(wh, splits[0]);
  EXPECT_EQ(batch.rowCount, 3u);
  EXPECT_EQ(batch.schema, schema());
}

TEST_F(InterchangeTest, SplitsPartitionTheScan) {
  makeTable(BucketSpec{{"id"}, 4});
  int64_t next = 0;
  for (int i = 0; i < 5; ++i) {
    addSegment(20, next);
  }
  auto splits = planSplits(wh, ref, 3);
  std::vector<Row> all;
  std::vector<std::set<int64_t>> idsPerSplit;
  for (const auto& s : splits) {
    auto rows = fetchSplit(wh, s).rows();
    std::set<int64_t> ids;
    for (const auto& r : rows) {
      ids.insert(r[0].as<int64_t>());
    }
    idsPerSplit.push_back(ids);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  for (size_t a = 0; a < idsPerSplit.size(); ++a) {
    for (size_t b = a + 1; b < idsPerSplit.size(); ++b) {
      std::vector<int64_t> common;
      std::set_intersection(
          idsPerSplit[a].begin(), idsPerSplit[a].end(), idsPerSplit[b].begin(),
          idsPerSplit[b].end(), std::back_inserter(common));
      EXPECT_TRUE(common.empty());
    }
  }
  EXPECT_EQ(sorted(all), sorted(scan()));
}

TEST_F(InterchangeTest, StaleSplit) {
  makeTable();
  int64_t next = 0;
  addSegment(3, next);
  auto splits = planSplits(wh, ref, 1);
  auto txn = wh.begin(ref.database, ref.name);
  std::vector<Row> rows{row(100)};
  wh.writeRows(txn, rows, SaveMode::kOverwrite);
  wh.commit(txn);
  EXPECT_NCWC_ERROR(fetchSplit(wh, splits[0]), ErrorCode::kStaleSplit);
}

TEST_F(InterchangeTest, ParallelReadIsDeterministic) {
  makeTable(BucketSpec{{"id"}, 3});
  int64_t next = 0;
  for (int i = 0; i < 7; ++i) {
    addSegment(i + 1, next);
  }
  auto sequential = scan();
  auto p1 = parallelRead(wh, ref, 1);
  EXPECT_EQ(p1.rows(), sequential);
  for (int p : {2, 3, 8}) {
    TransferReport report;
    auto batch = parallelRead(wh, ref, p, &report);
    EXPECT_EQ(batch, p1) << p;
    EXPECT_EQ(report.splitCount, static_cast<int64_t>(planSplits(wh, ref, p).size()));
    EXPECT_EQ(report.inferencePasses, 0);
  }
}

TEST_F(InterchangeTest, ParallelReadOfEmptyTable) {
  makeTable();
  auto batch = parallelRead(wh, ref, 4);
  EXPECT_EQ(batch.rowCount, 0u);
  EXPECT_EQ(batch.schema, schema());
}

TEST_F(InterchangeTest, SplitPlanCounterAdvances) {
  makeTable();
  auto before = splitPlanCount();
  parallelRead(wh, ref, 2);
  planSplits(wh, ref, 2);
  EXPECT_EQ(splitPlanCount(), before + 2);
}

// ---------------------------------------------------------------------------
// Staged writes
// ---------------------------------------------------------------------------

TEST_F(InterchangeTest, StageFiveRowsOneFile) {
  auto meta = makeTable();
  std::vector<Row> rows{row(1), row(2), row(3), row(4), row(5)};
  auto staged = stageWrite(RecordBatch::fromRows(schema(), rows), dir / "staging", meta);
  ASSERT_EQ(staged.files.size(), 1u);
  EXPECT_EQ(staged.rows, 5);
  EXPECT_EQ(staged.jobDir.parent_path(), dir / "staging");
  EXPECT_EQ(segment_format::readFile(staged.files[0].path).rows, rows);
  EXPECT_TRUE(scan().empty());
}

TEST_F(InterchangeTest, StageWithBuckets) {
  auto meta = makeTable(BucketSpec{{"id"}, 2});
  std::vector<Row> rows{row(1), row(2), row(3), row(4), row(5)};
  auto staged = stageWrite(RecordBatch::fromRows(schema(), rows), dir / "staging", meta);
  EXPECT_LE(staged.files.size(), 2u);
  std::vector<Row> reread;
  for (const auto& f : staged.files) {
    auto decoded = segment_format::readFile(f.path);
    EXPECT_EQ(decoded.columns, schema());
    for (const auto& r : decoded.rows) {
      EXPECT_EQ(assignBucket(r, meta), f.info.bucket);
    }
    reread.insert(reread.end(), decoded.rows.begin(), decoded.rows.end());
  }
  EXPECT_EQ(sorted(reread), sorted(rows));
}

TEST_F(InterchangeTest, SchemaCompatibility) {
  auto meta = makeTable();
  std::vector<Column> widened{
      {"id", WarehouseType::of(K::kInt)}, {"v", WarehouseType::of(K::kString)}};
  EXPECT_NO_THROW(checkSchemaCompatible(widened, meta));
  std::vector<Column> renamed{
      {"key", WarehouseType::of(K::kBigint)}, {"v", WarehouseType::of(K::kString)}};
  EXPECT_NCWC_ERROR(checkSchemaCompatible(renamed, meta), ErrorCode::kSchemaMismatch);
  std::vector<Column> retyped{
      {"id", WarehouseType::of(K::kString)}, {"v", WarehouseType::of(K::kString)}};
  EXPECT_NCWC_ERROR(checkSchemaCompatible(retyped, meta), ErrorCode::kSchemaMismatch);
  EXPECT_NCWC_ERROR(
      checkSchemaCompatible(std::span(widened).first(1), meta), ErrorCode::kSchemaMismatch);
}

TEST_F(InterchangeTest, CommitLoadAppendIsOneTransaction) {
  auto meta = makeTable(BucketSpec{{"id"}, 2});
  std::vector<Row> rows{row(1), row(2), row(3), row(4)};
  auto staged = stageWrite(RecordBatch::fromRows(schema(), rows), dir / "staging", meta);
  ASSERT_EQ(staged.files.size(), 2u);
  auto report = commitLoad(wh, ref, staged, SaveMode::kAppend);
  EXPECT_EQ(report.rowsMoved, 4);
  EXPECT_EQ(report.stagingFiles, 2);
  EXPECT_EQ(sorted(scan()), sorted(rows));
  auto log = wh.readLog(ref.database, ref.name);
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(log[1].segments.size(), 2u);
  EXPECT_FALSE(fs::exists(staged.jobDir));
}

TEST_F(InterchangeTest, CommitLoadIgnoreOnNonEmpty) {
  auto meta = makeTable();
  int64_t next = 0;
  addSegment(2, next);
  auto before = scan();
  std::vector<Row> rows{row(50)};
  auto staged = stageWrite(RecordBatch::fromRows(schema(), rows), dir / "staging", meta);
  auto report = commitLoad(wh, ref, staged, SaveMode::kIgnore);
  EXPECT_EQ(report.rowsMoved, 0);
  EXPECT_EQ(scan(), before);
  EXPECT_FALSE(fs::exists(staged.jobDir));
}

TEST_F(InterchangeTest, CommitLoadErrorIfExistsKeepsStaging) {
  auto meta = makeTable();
  int64_t next = 0;
  addSegment(2, next);
  auto before = scan();
  std::vector<Row> rows{row(50)};
  auto staged = stageWrite(RecordBatch::fromRows(schema(), rows), dir / "staging", meta);
  EXPECT_NCWC_ERROR(commitLoad(wh, ref, staged, SaveMode::kErrorIfExists), ErrorCode::kExists);
  EXPECT_EQ(scan(), before);
  EXPECT_TRUE(fs::exists(staged.files[0].path));
}

TEST_F(InterchangeTest, CommitLoadOverwrite) {
  auto meta = makeTable();
  int64_t next = 0;
  addSegment(2, next);
  std::vector<Row> rows{row(50), row(51)};
  auto staged = stageWrite(RecordBatch::fromRows(schema(), rows), dir / "staging", meta);
  commitLoad(wh, ref, staged, SaveMode::kOverwrite);
  EXPECT_EQ(scan(), rows);
}

TEST_F(InterchangeTest, InjectedFailureAtEveryStepLeavesTableUnchanged) {
  auto meta = makeTable(BucketSpec{{"id"}, 3});
  int64_t next = 0;
  addSegment(4, next);
  std::vector<Row> rows;
  for (int64_t i = 100; i < 130; ++i) {
    rows.push_back(row(i));
  }
  auto batch = RecordBatch::fromRows(schema(), rows);

  std::vector<std::string> steps;
  {
    auto probe = stageWrite(batch, dir / "probe", meta);
    TempDir other;
    Warehouse copy(other / "wh");
    auto m = meta;
    copy.createTable(m, false);
    commitLoad(copy, ref, probe, SaveMode::kAppend, [&](std::string_view s) {
      steps.emplace_back(s);
    });
  }
  ASSERT_EQ(steps.size(), 3u + 3u);

  for (SaveMode mode : {SaveMode::kAppend, SaveMode::kOverwrite}) {
    for (const auto& failAt : steps) {
      auto before = scan();
      auto staged = stageWrite(batch, dir / "staging", meta);
      EXPECT_ANY_THROW(commitLoad(wh, ref, staged, mode, [&](std::string_view s) {
        if (s == failAt) {
          throw std::runtime_error("injected");
        }
      }));
      EXPECT_EQ(scan(), before) << failAt;
      for (const auto& f : staged.files) {
        EXPECT_TRUE(fs::exists(f.path)) << failAt;
      }
      EXPECT_TRUE(wh.logState(ref.database, ref.name).openTxns.empty());
      fs::remove_all(staged.jobDir);
    }
  }
}

} // namespace
} // namespace ncwc
