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

#include <benchmark/benchmark.h>

#include <filesystem>

#include "ncwc/identifier.h"
#include "ncwc/jobs.h"

namespace ncwc {
namespace {

namespace fs = std::filesystem;

constexpr JobKind kKinds[] = {
    JobKind::kDocToWarehouse, JobKind::kWarehouseToDoc, JobKind::kDocToSession,
    JobKind::kSessionToDoc, JobKind::kSessionToWarehouse, JobKind::kWarehouseToSession};

/// Stores under a scratch directory holding `rows` generated documents plus a
/// warehouse table and a session table built from them.
class Stores {
 public:
  Stores(int64_t rows, int parallelism)
      : root_(fs::temp_directory_path() / ("ncwc-bm-" + newUuid())),
        config_(makeConfig(root_, parallelism)),
        session_(Session::build(config_)),
        docs_(config_.docstoreRoot),
        runner_(session_, docs_) {
    docs_.insertMany(CollectionRef{"bench", "source"}, syntheticDocuments(rows));
    runner_.run(JobSpec{JobKind::kDocToWarehouse, "bench.source", "bench_wh"});
    runner_.run(JobSpec{JobKind::kDocToSession, "bench.source", "bench_sess"});
  }
  ~Stores() {
    std::error_code ec;
    fs::remove_all(root_, ec);
  }

  TransferReport run(JobKind kind) {
    JobSpec spec{kind, {}, {}, SaveMode::kOverwrite};
    switch (kind) {
      case JobKind::kDocToWarehouse:
        spec.source = "bench.source";
        spec.dest = "bench_wh_out";
        break;
      case JobKind::kWarehouseToDoc:
        spec.source = "bench_wh";
        spec.dest = "bench.from_wh";
        break;
      case JobKind::kDocToSession:
        spec.source = "bench.source";
        spec.dest = "bench_sess_out";
        break;
      case JobKind::kSessionToDoc:
        spec.source = "bench_sess";
        spec.dest = "bench.from_sess";
        break;
      case JobKind::kSessionToWarehouse:
        spec.source = "bench_sess";
        spec.dest = "bench_wh2";
        break;
      case JobKind::kWarehouseToSession:
        spec.source = "bench_wh";
        spec.dest = "bench_sess2";
        break;
    }
    return runner_.run(spec);
  }

  Session& session() {
    return session_;
  }

 private:
  static SessionConfig makeConfig(const fs::path& root, int parallelism) {
    SessionConfig config = SessionConfig::underDirectory(root);
    config.parallelism = parallelism;
    return config;
  }

  fs::path root_;
  SessionConfig config_;
  Session session_;
  DocStore docs_;
  JobRunner runner_;
};

void BM_Job(benchmark::State& state) {
  JobKind kind = kKinds[state.range(0)];
  int64_t rows = state.range(1);
  Stores stores(rows, 2);
  state.SetLabel(std::string(jobKindLabel(kind)));
  TransferReport last;
  for (auto _ : state) {
    last = stores.run(kind);
  }
  state.SetItemsProcessed(state.iterations() * rows);
  state.counters["inference"] = static_cast<double>(last.inferencePasses);
  state.counters["serialization"] = static_cast<double>(last.serializationSteps);
  state.counters["splits"] = static_cast<double>(last.splitCount);
}
BENCHMARK(BM_Job)
    ->ArgsProduct({{0, 1, 2, 3, 4, 5}, {1000, 10000}})
    ->ArgNames({"job", "rows"})
    ->Unit(benchmark::kMillisecond);

void BM_ParallelRead(benchmark::State& state) {
  Stores stores(20000, 1);
  auto& session = stores.session();
  for (int i = 0; i < 15; ++i) {
    stores.run(JobKind::kSessionToWarehouse);
    session.writeDataset(session.sessionRead("default", "bench_sess"), "bench_wh2", SaveMode::kAppend);
  }
  TableRef table = session.resolve("bench_wh2");
  int parallelism = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallelRead(session.warehouse(), table, parallelism));
  }
}
BENCHMARK(BM_ParallelRead)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_InferSchema(benchmark::State& state) {
  std::vector<Document> docs;
  for (auto& obj : syntheticDocuments(state.range(0))) {
    docs.emplace_back(std::move(obj));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(removeNullSchema(inferSchema(docs)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InferSchema)->Arg(10000);

void BM_CanonicalEncode(benchmark::State& state) {
  auto objs = syntheticDocuments(1000);
  for (auto _ : state) {
    for (const auto& obj : objs) {
      benchmark::DoNotOptimize(canonicalEncode(DocValue(obj)));
    }
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_CanonicalEncode);

} // namespace
} // namespace ncwc

BENCHMARK_MAIN();
