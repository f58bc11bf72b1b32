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

#include "ncwc/streaming.h"

#include <algorithm>
#include <iterator>
#include <memory>

#include <fmt/format.h>

namespace ncwc {

BatchHandle::BatchHandle(int64_t batchId, std::optional<Transaction> txn)
    : batchId_(batchId), duplicate_(!txn), txn_(std::move(txn)) {}

StreamSink::StreamSink(Warehouse& warehouse, TableRef table)
    : warehouse_(warehouse), table_(std::move(table)) {
  warehouse_.recoverTable(table_.database, table_.name);
}

int64_t StreamSink::lastCommittedBatchId() const {
  return warehouse_.logState(table_.database, table_.name).lastCommittedBatchId;
}

BatchHandle StreamSink::beginBatch(int64_t batchId) {
  if (batchId < 0) {
    fail(ErrorCode::kInvalidArgument, "batch id must be >= 0");
  }
  if (batchId <= lastCommittedBatchId()) {
    return BatchHandle(batchId, std::nullopt);
  }
  return BatchHandle(batchId, warehouse_.begin(table_.database, table_.name, batchId));
}

namespace {

Transaction& openTxn(BatchHandle& handle, std::optional<Transaction>& txn) {
  if (!txn || !txn->isOpen()) {
    fail(
        ErrorCode::kNoTxn,
        fmt::format("batch {} has no open transaction", handle.batchId()));
  }
  return *txn;
}

} // namespace

void StreamSink::writeBatch(BatchHandle& handle, std::span<const Row> rows) {
  if (handle.duplicate_) {
    return;
  }
  warehouse_.writeRows(openTxn(handle, handle.txn_), rows, SaveMode::kAppend);
}

void StreamSink::commitBatch(BatchHandle& handle) {
  if (handle.duplicate_) {
    return;
  }
  warehouse_.commit(openTxn(handle, handle.txn_));
}

void StreamSink::abortBatch(BatchHandle& handle) {
  if (handle.duplicate_) {
    return;
  }
  warehouse_.abort(openTxn(handle, handle.txn_));
}

RowSource rowSourceOf(std::vector<std::vector<Row>> groups) {
  auto state = std::make_shared<std::pair<std::vector<std::vector<Row>>, size_t>>(
      std::move(groups), 0);
  return [state]() -> std::optional<std::vector<Row>> {
    auto& [all, next] = *state;
    if (next >= all.size()) {
      return std::nullopt;
    }
    return std::move(all[next++]);
  };
}

StreamResult runStream(
    const RowSource& source,
    StreamSink& sink,
    int64_t maxRowsPerBatch,
    int64_t firstBatchId,
    const StreamFaultHook& hook) {
  if (maxRowsPerBatch < 1) {
    fail(ErrorCode::kInvalidArgument, "batch size must be >= 1");
  }
  StreamResult result;
  int64_t batchId = firstBatchId;
  std::vector<Row> pending;
  bool exhausted = false;

  auto step = [&](std::string_view name) {
    if (hook) {
      hook(batchId, name);
    }
  };

  // Returns false when the batch failed.
  auto runBatch = [&](std::vector<Row> rows) -> bool {
    std::optional<BatchHandle> handle;
    try {
      step("begin");
      handle.emplace(sink.beginBatch(batchId));
      if (handle->duplicate()) {
        ++result.duplicateBatches;
        ++batchId;
        return true;
      }
      step("write");
      sink.writeBatch(*handle, rows);
      step("commit");
      sink.commitBatch(*handle);
    } catch (const Error& e) {
      if (handle && handle->isOpen()) {
        sink.abortBatch(*handle);
      }
      result.failure = e;
      return false;
    } catch (...) {
      if (handle && handle->isOpen()) {
        sink.abortBatch(*handle);
      }
      throw;
    }
    result.committedRows += static_cast<int64_t>(rows.size());
    ++result.committedBatches;
    ++batchId;
    return true;
  };

  while (true) {
    while (!exhausted && static_cast<int64_t>(pending.size()) < maxRowsPerBatch) {
      auto group = source();
      if (!group) {
        exhausted = true;
        break;
      }
      for (auto& row : *group) {
        pending.push_back(std::move(row));
      }
    }
    if (pending.empty()) {
      break;
    }
    size_t take = std::min(pending.size(), static_cast<size_t>(maxRowsPerBatch));
    std::vector<Row> batch(
        std::make_move_iterator(pending.begin()),
        std::make_move_iterator(pending.begin() + static_cast<std::ptrdiff_t>(take)));
    pending.erase(pending.begin(), pending.begin() + static_cast<std::ptrdiff_t>(take));
    if (!runBatch(std::move(batch))) {
      break;
    }
  }
  return result;
}

} // namespace ncwc
