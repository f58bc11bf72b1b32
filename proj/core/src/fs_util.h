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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ncwc::detail {

namespace fs = std::filesystem;

std::string readFile(const fs::path& path);

/// Reads at most `limit` bytes from the start of the file.
std::string readFilePrefix(const fs::path& path, size_t limit);

/// Writes `content` to a temporary sibling, fsyncs it and renames it over
/// `path`.
void writeFileAtomic(const fs::path& path, std::string_view content);

/// Appends with a single write(2) on an O_APPEND descriptor, then fsyncs.
void appendDurable(const fs::path& path, std::string_view content);

/// Drops any bytes after the last '\n' (a torn trailing record).
void truncateToLastNewline(const fs::path& path);

void fsyncDirectory(const fs::path& dir);

/// Splits on '\n'; a final segment without a terminating newline is torn and
/// is not returned.
std::vector<std::string_view> completeLines(std::string_view content);

/// Sorted names of subdirectories whose names are valid identifiers.
std::vector<std::string> listIdentifierDirs(const fs::path& dir);

/// Exclusive advisory lock (flock) on a lock file, held for the object's
/// lifetime.
class FileLock {
 public:
  explicit FileLock(const fs::path& lockFile);
  ~FileLock();

  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

} // namespace ncwc::detail
