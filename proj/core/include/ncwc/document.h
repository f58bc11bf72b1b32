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

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace ncwc {

/// Milliseconds since the Unix epoch, UTC.
struct Timestamp {
  int64_t millis = 0;

  auto operator<=>(const Timestamp&) const = default;
};

using Binary = std::vector<uint8_t>;

class DocValue;
using Array = std::vector<DocValue>;

/// Insertion-ordered field map. Two objects compare equal when they hold the
/// same set of (name, value) pairs regardless of order, which matches their
/// canonical encodings.
class Object {
 public:
  using Field = std::pair<std::string, DocValue>;

  Object() = default;
  Object(std::initializer_list<Field> fields);

  /// Inserts or replaces. Replacing keeps the original position.
  void set(std::string name, DocValue value);
  const DocValue* find(std::string_view name) const;
  bool contains(std::string_view name) const;
  bool erase(std::string_view name);

  const std::vector<Field>& fields() const {
    return fields_;
  }
  size_t size() const {
    return fields_.size();
  }
  bool empty() const {
    return fields_.empty();
  }

  /// Fields ordered by code point of the name.
  std::vector<const Field*> sortedFields() const;

  friend bool operator==(const Object& a, const Object& b);

 private:
  std::vector<Field> fields_;
};

/// Variant index order is significant: it is the DocKind value and the
/// ordering used for canonical encoding tags.
enum class DocKind : uint8_t {
  kNull = 0,
  kBoolean = 1,
  kInt32 = 2,
  kInt64 = 3,
  kDouble = 4,
  kText = 5,
  kTimestamp = 6,
  kBinary = 7,
  kArray = 8,
  kObject = 9,
};

std::string_view docKindName(DocKind kind);

class DocValue {
 public:
  using Storage = std::variant<
      std::monostate,
      bool,
      int32_t,
      int64_t,
      double,
      std::string,
      Timestamp,
      Binary,
      Array,
      Object>;

  DocValue() = default;
  DocValue(std::nullptr_t) {}
  DocValue(bool v) : value_(v) {}
  DocValue(int32_t v) : value_(v) {}
  DocValue(int64_t v) : value_(v) {}
  DocValue(double v) : value_(v) {}
  DocValue(std::string v) : value_(std::move(v)) {}
  DocValue(const char* v) : value_(std::string(v)) {}
  DocValue(Timestamp v) : value_(v) {}
  DocValue(Binary v) : value_(std::move(v)) {}
  DocValue(Array v) : value_(std::move(v)) {}
  DocValue(Object v) : value_(std::move(v)) {}

  DocKind kind() const {
    return static_cast<DocKind>(value_.index());
  }
  bool isNull() const {
    return kind() == DocKind::kNull;
  }

  template <typename T>
  const T& as() const {
    return std::get<T>(value_);
  }
  template <typename T>
  const T* tryAs() const {
    return std::get_if<T>(&value_);
  }

  const Storage& storage() const {
    return value_;
  }

  /// Doubles compare by bit pattern so that equality agrees with the
  /// canonical encoding (0.0 != -0.0, NaN == NaN of the same payload).
  friend bool operator==(const DocValue& a, const DocValue& b);

 private:
  Storage value_;
};

/// A document is an object carrying a Text `_id`.
class Document {
 public:
  /// Validates field names and the `_id` field.
  explicit Document(Object root);

  const Object& root() const {
    return root_;
  }
  const std::string& id() const;

  friend bool operator==(const Document&, const Document&) = default;

 private:
  Object root_;
};

/// True for names accepted as object field names: non-empty, valid UTF-8,
/// no ';' or '.', and not starting with '$' (reserved for JSON wrappers).
bool isValidFieldName(std::string_view name);

/// Recursively checks every field name and timestamp invariant.
void validateValue(const DocValue& value);

// ---------------------------------------------------------------------------
// Field types and warehouse types
// ---------------------------------------------------------------------------

/// Per-field inferred type. Mirrors the value tags; kNull means no occurrence
/// of the field carried a type.
using FieldType = DocKind;

FieldType fieldTypeOf(const DocValue& value);

/// Least upper bound under Int32 < Int64 < Double; any other mixed pair of
/// non-Null types is Text. Null is the identity element.
FieldType widen(FieldType a, FieldType b);

struct WarehouseType {
  enum class Kind : uint8_t {
    kBoolean,
    kTinyint,
    kSmallint,
    kInt,
    kBigint,
    kFloat,
    kDouble,
    kDecimal,
    kChar,
    kString,
    kTimestamp,
    kBinary,
  };

  Kind kind = Kind::kString;
  // DECIMAL(precision, scale)
  int precision = 0;
  int scale = 0;
  // CHAR(length)
  int length = 0;

  static WarehouseType of(Kind kind) {
    return WarehouseType{kind};
  }
  static WarehouseType decimal(int precision, int scale);
  static WarehouseType fixedChar(int length);

  /// Upper-case type name, e.g. "BIGINT", "DECIMAL(10,2)", "CHAR(8)".
  std::string toString() const;

  /// Case-insensitive inverse of toString. Throws E_TYPE on unknown names.
  static WarehouseType parse(std::string_view text);

  friend bool operator==(const WarehouseType&, const WarehouseType&) = default;
};

/// Total over non-Null field types; Array and Object map to STRING.
WarehouseType mapType(FieldType type);

struct ColumnSpec {
  std::string name;
  FieldType type = FieldType::kNull;

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

struct InferredSchema {
  std::vector<ColumnSpec> columns;

  const ColumnSpec* find(std::string_view name) const;

  friend bool operator==(const InferredSchema&, const InferredSchema&) =
      default;
};

/// Incremental form of inferSchema for callers that stream documents.
class SchemaInferrer {
 public:
  void observe(const Document& doc);
  const InferredSchema& schema() const {
    return schema_;
  }

 private:
  InferredSchema schema_;
};

InferredSchema inferSchema(std::span<const Document> docs);

InferredSchema removeNullSchema(const InferredSchema& schema);

/// One "<name>;<TYPE>" string per column. Throws E_NULL_COLUMN if a Null
/// column remains.
std::vector<std::string> flattenSchema(const InferredSchema& schema);

/// Splits a flattened column at the first ';'.
std::pair<std::string, WarehouseType> parseFlattenedColumn(
    std::string_view column);

/// Converts a document value into the value stored in a column whose field
/// type is `columnType`: numeric values widen, values landing in a Text
/// column that are not Text are rendered as canonical JSON, Array and
/// Object values always become canonical JSON text. Null stays Null.
DocValue toColumnValue(const DocValue& value, FieldType columnType);

// ---------------------------------------------------------------------------
// Encodings
// ---------------------------------------------------------------------------

/// Int32 when `v` fits in 32 bits, else Int64. Used for counters written as
/// plain JSON numbers.
DocValue integerValue(int64_t v);

/// Deterministic injective binary encoding: one tag byte, big-endian
/// fixed-width scalars, u32 length prefixes for Text/Binary/Array/Object,
/// object keys in code-point order.
std::vector<uint8_t> canonicalEncode(const DocValue& value);
void canonicalEncodeTo(const DocValue& value, std::vector<uint8_t>& out);

/// Inverse of canonicalEncode. Throws E_INVALID_ARGUMENT on malformed input.
DocValue canonicalDecode(std::span<const uint8_t> bytes);

/// Canonical JSON text: UTF-8, sorted object keys, no whitespace.
/// Timestamp -> {"$ts":n}, Binary -> {"$bin":"<base64>"}, Int64 values that
/// fit in 32 bits -> {"$i64":n}, non-finite doubles -> {"$f64":"nan"|...}.
/// Finite doubles always carry a '.' or exponent.
std::string toCanonicalJson(const DocValue& value);
void appendCanonicalJson(const DocValue& value, std::string& out);

/// Parses JSON text, recognising the wrappers above. Integers fitting 32 bits
/// become Int32, larger ones Int64; numbers with a fraction or exponent
/// become Double. Field order of objects is preserved.
DocValue parseJson(std::string_view text);

std::string base64Encode(std::span<const uint8_t> bytes);
Binary base64Decode(std::string_view text);

} // namespace ncwc
