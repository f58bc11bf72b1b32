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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>

#include "ncwc/document.h"
#include "ncwc/error.h"
#include "ncwc/identifier.h"

namespace ncwc {

inline void PrintTo(const DocValue& value, std::ostream* os) {
  *os << toCanonicalJson(value);
}

} // namespace ncwc

namespace ncwc::testing {

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir()
      : path_(
            std::filesystem::temp_directory_path() /
            ("ncwc-test-" + ncwc::newUuid())) {
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const {
    return path_;
  }
  std::filesystem::path operator/(const std::string& child) const {
    return path_ / child;
  }

 private:
  std::filesystem::path path_;
};

/// Runs `fn` and returns the code of the ncwc::Error it threw.
inline std::optional<ErrorCode> errorOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

#define EXPECT_NCWC_ERROR(stmt, code)                                        \
  EXPECT_EQ(::ncwc::testing::errorOf([&] { (void)(stmt); }), (code)) \
      << #stmt

/// Copies a directory tree; target must not exist.
inline void copyTree(const std::filesystem::path& from, const std::filesystem::path& to) {
  std::filesystem::copy(from, to, std::filesystem::copy_options::recursive);
}

/// Random document values of bounded depth. Field names avoid '$', '.', ';'.
class ValueGenerator {
 public:
  explicit ValueGenerator(uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() {
    return rng_;
  }

  int uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }

  std::string text(int maxLen = 8) {
    static constexpr const char* kPieces[] = {
        "a", "b", "z", "Q", "0", "9", " ", "\"", "\\", "\n", "\t", "é", "ß", "日本", "😀", "/"};
    std::string s;
    for (int n = uniform(0, maxLen); n > 0; --n) {
      s += kPieces[uniform(0, 15)];
    }
    return s;
  }

  std::string fieldName() {
    static constexpr const char* kNames[] = {
        "a", "b", "c", "x", "y", "name", "_id", "k1", "k_2", "É", "값"};
    return kNames[uniform(0, 10)];
  }

  double finiteDouble() {
    switch (uniform(0, 5)) {
      case 0:
        return 0.0;
      case 1:
        return -0.0;
      case 2:
        return std::uniform_real_distribution<double>(-1e6, 1e6)(rng_);
      case 3:
        return std::ldexp(
            std::uniform_real_distribution<double>(-1, 1)(rng_), uniform(-1000, 1000));
      case 4:
        return static_cast<double>(uniform(-1000, 1000));
      default:
        return 1.0 / 3.0;
    }
  }

  DocValue scalar(bool allowNonFinite = true) {
    switch (uniform(0, 8)) {
      case 0:
        return DocValue();
      case 1:
        return DocValue(uniform(0, 1) == 1);
      case 2:
        return DocValue(static_cast<int32_t>(rng_()));
      case 3:
        return DocValue(static_cast<int64_t>(rng_()));
      case 4:
        if (allowNonFinite && uniform(0, 9) == 0) {
          double special[] = {
              std::numeric_limits<double>::infinity(),
              -std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::quiet_NaN()};
          return DocValue(special[uniform(0, 2)]);
        }
        return DocValue(finiteDouble());
      case 5:
        return DocValue(text());
      case 6:
        return DocValue(Timestamp{static_cast<int64_t>(rng_()) / 4});
      case 7: {
        Binary b;
        for (int n = uniform(0, 6); n > 0; --n) {
          b.push_back(static_cast<uint8_t>(uniform(0, 255)));
        }
        return DocValue(std::move(b));
      }
      default:
        return DocValue(static_cast<int64_t>(uniform(-5, 5)));
    }
  }

  DocValue value(int depth = 3) {
    int pick = uniform(0, depth > 0 ? 11 : 8);
    if (pick <= 8) {
      return scalar();
    }
    if (pick <= 10) {
      Array a;
      for (int n = uniform(0, 4); n > 0; --n) {
        a.push_back(value(depth - 1));
      }
      return DocValue(std::move(a));
    }
    Object o;
    for (int n = uniform(0, 4); n > 0; --n) {
      o.set(fieldName(), value(depth - 1));
    }
    return DocValue(std::move(o));
  }

 private:
  std::mt19937_64 rng_;
};

/// Rows sorted by canonical JSON for multiset comparison.
inline std::vector<Array> sortedRows(std::vector<Array> rows) {
  std::sort(rows.begin(), rows.end(), [](const Array& a, const Array& b) {
    return toCanonicalJson(DocValue(a)) < toCanonicalJson(DocValue(b));
  });
  return rows;
}

/// Equivalence of a source document value and the value read back after a
/// trip through table columns: numbers compare by value across widths, and
/// a value stored in a text column compares against its canonical JSON.
inline bool equivalentValue(const DocValue& src, const DocValue& back) {
  if (src == back) {
    return true;
  }
  auto number = [](const DocValue& v) -> std::optional<long double> {
    switch (v.kind()) {
      case DocKind::kInt32:
        return v.as<int32_t>();
      case DocKind::kInt64:
        return static_cast<long double>(v.as<int64_t>());
      case DocKind::kDouble:
        return v.as<double>();
      default:
        return std::nullopt;
    }
  };
  auto a = number(src);
  auto b = number(back);
  if (a && b) {
    return *a == *b;
  }
  if (back.kind() == DocKind::kText) {
    return back.as<std::string>() == toCanonicalJson(src);
  }
  return false;
}

/// Null fields of the source are expected to be absent.
inline bool equivalentObject(const Object& src, const Object& back) {
  size_t present = 0;
  for (const auto& [name, value] : src.fields()) {
    if (value.isNull()) {
      if (back.contains(name)) {
        return false;
      }
      continue;
    }
    ++present;
    const DocValue* other = back.find(name);
    if (other == nullptr || !equivalentValue(value, *other)) {
      return false;
    }
  }
  return present == back.size();
}

/// Multiset comparison keyed by `_id`; the empty string on success,
/// otherwise a description of the first difference.
inline std::string compareById(
    const std::vector<Object>& src,
    const std::vector<Object>& back) {
  if (src.size() != back.size()) {
    return "size " + std::to_string(src.size()) + " vs " + std::to_string(back.size());
  }
  std::map<std::string, const Object*> byId;
  for (const auto& obj : back) {
    const DocValue* id = obj.find("_id");
    if (id == nullptr || id->kind() != DocKind::kText) {
      return "read-back document without text _id";
    }
    if (!byId.emplace(id->as<std::string>(), &obj).second) {
      return "duplicate _id " + id->as<std::string>();
    }
  }
  for (const auto& obj : src) {
    std::string id = obj.find("_id")->as<std::string>();
    auto it = byId.find(id);
    if (it == byId.end()) {
      return "missing _id " + id;
    }
    if (!equivalentObject(obj, *it->second)) {
      return "document " + id + ": " + toCanonicalJson(DocValue(obj)) + " vs " +
          toCanonicalJson(DocValue(*it->second));
    }
  }
  return {};
}

} // namespace ncwc::testing
