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
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ncwc/error.h"
#include "ncwc/interchange.h"
#include "ncwc/warehouse.h"

namespace ncwc {

struct MicroBatch {
  int64_t batchId = 0;
  std::vector<Row> rows;
};

/// Handle returned by StreamSink::beginBatch. A duplicate handle stands for
/// a batch id that was already committed; every operation on it is a no-op.
class BatchHandle {
 public:
  int64_t batchId() const {
    return batchId_;
  }
  bool duplicate() const {
    return duplicate_;
  }
  bool isOpen() const {
    return txn_ && txn_->isOpen();
  }
  std::optional<int64_t> txnId() const {
    return txn_ ? std::optional<int64_t>(txn_->id()) : std::nullopt;
  }

 private:
  friend class StreamSink;
  BatchHandle(int64_t batchId, std::optional<Transaction> txn);

  int64_t batchId_;
  bool duplicate_;
  std::optional<Transaction> txn_;
};

/// Append-only streaming sink over one warehouse table. Each micro-batch is
/// one transaction whose BEGIN and COMMIT records carry the batch id.
class StreamSink {
 public:
  /// Recovers the table (aborting unterminated transactions) before use.
  /// Throws E_NO_TABLE.
  StreamSink(Warehouse& warehouse, TableRef table);

  const TableRef& table() const {
    return table_;
  }
  /// Highest committed batch id in the log, -1 when none.
  int64_t lastCommittedBatchId() const;

  /// Throws E_TXN_OPEN.
  BatchHandle beginBatch(int64_t batchId);
  /// Throws E_NO_TXN when the handle is no longer open.
  void writeBatch(BatchHandle& handle, std::span<const Row> rows);
  void commitBatch(BatchHandle& handle);
  void abortBatch(BatchHandle& handle);

 private:
  Warehouse& warehouse_;
  TableRef table_;
};

/// Pull source: each call yields the next row group, nullopt at the end.
using RowSource = std::function<std::optional<std::vector<Row>>()>;

RowSource rowSourceOf(std::vector<std::vector<Row>> groups);

/// Called before each batch step ("begin", "write", "commit"). Throwing
/// fails the batch.
using StreamFaultHook = std::function<void(int64_t batchId, std::string_view step)>;

struct StreamResult {
  int64_t committedRows = 0;
  int64_t committedBatches = 0;
  int64_t duplicateBatches = 0;
  /// Set when a batch failed; that batch was aborted and the run stopped.
  std::optional<Error> failure;
};

/// Chunks the source into micro-batches of at most `maxRowsPerBatch` rows
/// with consecutive ids from `firstBatchId` and commits them one by one.
/// Never leaves a transaction open.
StreamResult runStream(
    const RowSource& source,
    StreamSink& sink,
    int64_t maxRowsPerBatch,
    int64_t firstBatchId = 0,
    const StreamFaultHook& hook = {});

} // namespace ncwc
