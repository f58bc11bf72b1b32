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

#include "ncwc/docstore.h"

#include <fmt/format.h>

#include "fs_util.h"
#include "ncwc/error.h"
#include "ncwc/identifier.h"

namespace ncwc {

namespace fs = std::filesystem;

CollectionRef CollectionRef::parse(std::string_view text) {
  auto dot = text.find('.');
  if (dot == std::string_view::npos) {
    fail(
        ErrorCode::kInvalidArgument,
        fmt::format("expected <db>.<collection>, got '{}'", text));
  }
  CollectionRef ref{
      std::string(text.substr(0, dot)), std::string(text.substr(dot + 1))};
  ref.validate();
  return ref;
}

std::string CollectionRef::toString() const {
  return database + "." + collection;
}

void CollectionRef::validate() const {
  checkIdentifier(database, "database");
  checkIdentifier(collection, "collection");
}

DocumentCursor::DocumentCursor(const fs::path& file)
    : content_(detail::readFile(file)) {}

std::optional<Document> DocumentCursor::next() {
  while (pos_ < content_.size()) {
    auto nl = content_.find('\n', pos_);
    if (nl == std::string::npos) {
      // Torn trailing write.
      pos_ = content_.size();
      return std::nullopt;
    }
    std::string_view line(content_.data() + pos_, nl - pos_);
    pos_ = nl + 1;
    if (line.empty()) {
      continue;
    }
    DocValue value = parseJson(line);
    if (value.kind() != DocKind::kObject) {
      fail(ErrorCode::kIo, "collection line is not a JSON object");
    }
    return Document(value.as<Object>());
  }
  return std::nullopt;
}

DocStore::DocStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) {
    fail(
        ErrorCode::kIo,
        fmt::format("cannot create store root '{}'", root_.string()));
  }
}

fs::path DocStore::collectionFile(const CollectionRef& ref) const {
  ref.validate();
  return root_ / ref.database / (ref.collection + ".jsonl");
}

const std::unordered_set<std::string>& DocStore::knownIds(
    const CollectionRef& ref,
    const fs::path& file) {
  auto& cache = idCache_[ref.toString()];
  std::error_code ec;
  auto size = fs::exists(file) ? fs::file_size(file, ec) : 0;
  if (size != cache.fileSize || (size == 0 && !cache.ids.empty())) {
    cache.ids.clear();
    cache.fileSize = 0;
    if (size > 0) {
      DocumentCursor cursor(file);
      while (auto doc = cursor.next()) {
        cache.ids.insert(doc->id());
      }
    }
    cache.fileSize = size;
  }
  return cache.ids;
}

size_t DocStore::insertMany(
    const CollectionRef& ref,
    std::span<const Object> docs) {
  fs::path file = collectionFile(ref);
  std::lock_guard guard(mutex_);

  std::error_code ec;
  fs::create_directories(file.parent_path(), ec);
  if (ec) {
    fail(ErrorCode::kIo, fmt::format("cannot create '{}'", ref.database));
  }
  detail::FileLock lock(file.parent_path() / ("." + ref.collection + ".lock"));
  if (fs::exists(file)) {
    detail::truncateToLastNewline(file);
  }

  const auto& existing = knownIds(ref, file);
  std::unordered_set<std::string> batchIds;
  std::string payload;
  std::vector<std::string> ids;
  ids.reserve(docs.size());
  for (const auto& object : docs) {
    Object root = object;
    if (!root.contains("_id")) {
      Object withId;
      withId.set("_id", DocValue(newUuid()));
      for (const auto& [name, value] : root.fields()) {
        withId.set(name, value);
      }
      root = std::move(withId);
    }
    Document doc(std::move(root));
    if (existing.contains(doc.id()) || !batchIds.insert(doc.id()).second) {
      fail(
          ErrorCode::kDupId,
          fmt::format("duplicate _id '{}' in {}", doc.id(), ref.toString()));
    }
    ids.push_back(doc.id());
    appendCanonicalJson(DocValue(doc.root()), payload);
    payload.push_back('\n');
  }

  detail::appendDurable(file, payload);
  auto& cache = idCache_[ref.toString()];
  cache.ids.insert(ids.begin(), ids.end());
  cache.fileSize = fs::file_size(file);
  return docs.size();
}

size_t DocStore::insertMany(
    const CollectionRef& ref,
    std::span<const Document> docs) {
  std::vector<Object> objects;
  objects.reserve(docs.size());
  for (const auto& doc : docs) {
    objects.push_back(doc.root());
  }
  return insertMany(ref, std::span<const Object>(objects));
}

DocumentCursor DocStore::scan(const CollectionRef& ref) const {
  fs::path file = collectionFile(ref);
  if (!fs::exists(file)) {
    fail(ErrorCode::kNoCollection, ref.toString());
  }
  return DocumentCursor(file);
}

std::vector<Document> DocStore::scanAll(const CollectionRef& ref) const {
  auto cursor = scan(ref);
  std::vector<Document> docs;
  while (auto doc = cursor.next()) {
    docs.push_back(std::move(*doc));
  }
  return docs;
}

bool DocStore::hasCollection(const CollectionRef& ref) const {
  return fs::exists(collectionFile(ref));
}

std::vector<std::string> DocStore::listDatabases() const {
  return detail::listIdentifierDirs(root_);
}

std::vector<std::string> DocStore::listCollections(
    const std::string& database) const {
  checkIdentifier(database, "database");
  fs::path dir = root_ / database;
  if (!fs::is_directory(dir)) {
    fail(ErrorCode::kNoDatabase, database);
  }
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto& path = entry.path();
    if (entry.is_regular_file() && path.extension() == ".jsonl" &&
        isValidIdentifier(path.stem().string())) {
      names.push_back(path.stem().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

bool DocStore::dropCollection(const CollectionRef& ref) {
  fs::path file = collectionFile(ref);
  std::lock_guard guard(mutex_);
  idCache_.erase(ref.toString());
  std::error_code ec;
  if (!fs::remove(file, ec)) {
    return false;
  }
  fs::remove(file.parent_path() / ("." + ref.collection + ".lock"), ec);
  if (listCollections(ref.database).empty()) {
    fs::remove_all(file.parent_path(), ec);
  }
  return true;
}

} // namespace ncwc
