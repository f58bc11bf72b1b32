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

#include "fs_util.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>

#include <boost/uuid/random_generator.hpp>
#include <boost/uuid/uuid_io.hpp>
#include <fmt/format.h>

#include "ncwc/error.h"
#include "ncwc/identifier.h"

namespace ncwc {

bool isValidIdentifier(std::string_view name) {
  if (name.empty() || name.size() > 64) {
    return false;
  }
  auto alpha = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
  };
  if (!alpha(name.front())) {
    return false;
  }
  for (char c : name) {
    if (!alpha(c) && !(c >= '0' && c <= '9')) {
      return false;
    }
  }
  return true;
}

void checkIdentifier(std::string_view name, std::string_view what) {
  if (!isValidIdentifier(name)) {
    fail(
        ErrorCode::kInvalidArgument,
        fmt::format("invalid {} name '{}'", what, name));
  }
}

std::string newUuid() {
  thread_local boost::uuids::random_generator generator;
  return boost::uuids::to_string(generator());
}

namespace detail {

namespace {

[[noreturn]] void ioFail(std::string_view op, const fs::path& path) {
  fail(
      ErrorCode::kIo,
      fmt::format("{} '{}': {}", op, path.string(), std::strerror(errno)));
}

void writeAll(int fd, std::string_view content, const fs::path& path) {
  while (!content.empty()) {
    ssize_t n = ::write(fd, content.data(), content.size());
    if (n < 0) {
      if (errno == EINTR) {
        continue;
      }
      ioFail("write", path);
    }
    content.remove_prefix(static_cast<size_t>(n));
  }
}

} // namespace

std::string readFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ioFail("open", path);
  }
  return std::string(
      std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string readFilePrefix(const fs::path& path, size_t limit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ioFail("open", path);
  }
  std::string out(limit, '\0');
  in.read(out.data(), static_cast<std::streamsize>(limit));
  out.resize(static_cast<size_t>(in.gcount()));
  return out;
}

void writeFileAtomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp-" + newUuid();
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) {
    ioFail("create", tmp);
  }
  try {
    writeAll(fd, content, tmp);
    if (::fsync(fd) != 0) {
      ioFail("fsync", tmp);
    }
  } catch (...) {
    ::close(fd);
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
  ::close(fd);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::kIo, fmt::format("rename to '{}' failed", path.string()));
  }
}

void appendDurable(const fs::path& path, std::string_view content) {
  int fd =
      ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) {
    ioFail("open", path);
  }
  try {
    writeAll(fd, content, path);
    if (::fsync(fd) != 0) {
      ioFail("fsync", path);
    }
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

void truncateToLastNewline(const fs::path& path) {
  std::error_code ec;
  auto size = fs::file_size(path, ec);
  if (ec || size == 0) {
    return;
  }
  std::string content = readFile(path);
  auto last = content.rfind('\n');
  size_t keep = last == std::string::npos ? 0 : last + 1;
  if (keep != content.size()) {
    fs::resize_file(path, keep);
  }
}

void fsyncDirectory(const fs::path& dir) {
  int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

std::vector<std::string_view> completeLines(std::string_view content) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start < content.size()) {
    auto nl = content.find('\n', start);
    if (nl == std::string_view::npos) {
      break;
    }
    lines.push_back(content.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string> listIdentifierDirs(const fs::path& dir) {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    auto name = entry.path().filename().string();
    if (entry.is_directory() && isValidIdentifier(name)) {
      names.push_back(std::move(name));
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

FileLock::FileLock(const fs::path& lockFile) {
  fd_ = ::open(lockFile.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    ioFail("open lock", lockFile);
  }
  while (::flock(fd_, LOCK_EX) != 0) {
    if (errno != EINTR) {
      ::close(fd_);
      ioFail("flock", lockFile);
    }
  }
}

FileLock::~FileLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

} // namespace detail
} // namespace ncwc
