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
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ncwc/document.h"

namespace ncwc {

struct CollectionRef {
  std::string database;
  std::string collection;

  /// Parses "db.collection".
  static CollectionRef parse(std::string_view text);
  std::string toString() const;
  void validate() const;

  friend bool operator==(const CollectionRef&, const CollectionRef&) = default;
};

/// Reads one collection file from a snapshot taken at construction: bytes
/// appended after the cursor was opened are not observed.
class DocumentCursor {
 public:
  explicit DocumentCursor(const std::filesystem::path& file);

  std::optional<Document> next();

 private:
  std::string content_;
  size_t pos_ = 0;
};

/// Embedded schemaless store. Layout: <root>/<db>/<collection>.jsonl with one
/// canonical-JSON document per line.
class DocStore {
 public:
  explicit DocStore(std::filesystem::path root);

  const std::filesystem::path& root() const {
    return root_;
  }

  /// Appends the whole batch or nothing. Objects without `_id` get a UUIDv4
  /// id. Creates the database and collection when absent, also for an empty
  /// batch. Throws E_DUP_ID when any id collides with the collection or with
  /// another document of the batch.
  size_t insertMany(const CollectionRef& ref, std::span<const Object> docs);
  size_t insertMany(const CollectionRef& ref, std::span<const Document> docs);

  /// Throws E_NO_COLLECTION.
  DocumentCursor scan(const CollectionRef& ref) const;
  std::vector<Document> scanAll(const CollectionRef& ref) const;

  bool hasCollection(const CollectionRef& ref) const;
  std::vector<std::string> listDatabases() const;
  /// Throws E_NO_DATABASE.
  std::vector<std::string> listCollections(const std::string& database) const;
  /// Removes the file; the database directory goes away with its last
  /// collection.
  bool dropCollection(const CollectionRef& ref);

 private:
  std::filesystem::path collectionFile(const CollectionRef& ref) const;
  const std::unordered_set<std::string>& knownIds(
      const CollectionRef& ref,
      const std::filesystem::path& file);

  struct IdCache {
    uintmax_t fileSize = 0;
    std::unordered_set<std::string> ids;
  };

  std::filesystem::path root_;
  std::mutex mutex_;
  std::unordered_map<std::string, IdCache> idCache_;
};

} // namespace ncwc
