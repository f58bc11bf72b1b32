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

#include "ncwc/document.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ncwc/error.h"

namespace ncwc {

namespace {

bool isValidUtf8(std::string_view s) {
  size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    size_t extra;
    uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) {
      return false;
    }
    for (size_t k = 1; k <= extra; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) {
        return false;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
        (extra == 3 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

int numericRank(FieldType t) {
  switch (t) {
    case FieldType::kInt32:
      return 1;
    case FieldType::kInt64:
      return 2;
    case FieldType::kDouble:
      return 3;
    default:
      return 0;
  }
}

bool bitEqual(double a, double b) {
  return std::bit_cast<uint64_t>(a) == std::bit_cast<uint64_t>(b);
}

} // namespace

// ---------------------------------------------------------------------------
// Object / DocValue
// ---------------------------------------------------------------------------

Object::Object(std::initializer_list<Field> fields) {
  for (const auto& [name, value] : fields) {
    set(name, value);
  }
}

void Object::set(std::string name, DocValue value) {
  for (auto& field : fields_) {
    if (field.first == name) {
      field.second = std::move(value);
      return;
    }
  }
  fields_.emplace_back(std::move(name), std::move(value));
}

const DocValue* Object::find(std::string_view name) const {
  for (const auto& field : fields_) {
    if (field.first == name) {
      return &field.second;
    }
  }
  return nullptr;
}

bool Object::contains(std::string_view name) const {
  return find(name) != nullptr;
}

bool Object::erase(std::string_view name) {
  auto it = std::find_if(fields_.begin(), fields_.end(), [&](const Field& f) {
    return f.first == name;
  });
  if (it == fields_.end()) {
    return false;
  }
  fields_.erase(it);
  return true;
}

std::vector<const Object::Field*> Object::sortedFields() const {
  std::vector<const Field*> sorted;
  sorted.reserve(fields_.size());
  for (const auto& field : fields_) {
    sorted.push_back(&field);
  }
  // std::string comparison is bytewise, which for UTF-8 is code-point order.
  std::sort(sorted.begin(), sorted.end(), [](const Field* a, const Field* b) {
    return a->first < b->first;
  });
  return sorted;
}

bool operator==(const Object& a, const Object& b) {
  if (a.size() != b.size()) {
    return false;
  }
  for (const auto& [name, value] : a.fields_) {
    const DocValue* other = b.find(name);
    if (other == nullptr || !(*other == value)) {
      return false;
    }
  }
  return true;
}

bool operator==(const DocValue& a, const DocValue& b) {
  if (a.kind() != b.kind()) {
    return false;
  }
  if (a.kind() == DocKind::kDouble) {
    return bitEqual(a.as<double>(), b.as<double>());
  }
  return a.value_ == b.value_;
}

std::string_view docKindName(DocKind kind) {
  switch (kind) {
    case DocKind::kNull:
      return "Null";
    case DocKind::kBoolean:
      return "Boolean";
    case DocKind::kInt32:
      return "Int32";
    case DocKind::kInt64:
      return "Int64";
    case DocKind::kDouble:
      return "Double";
    case DocKind::kText:
      return "Text";
    case DocKind::kTimestamp:
      return "Timestamp";
    case DocKind::kBinary:
      return "Binary";
    case DocKind::kArray:
      return "Array";
    case DocKind::kObject:
      return "Object";
  }
  return "?";
}

bool isValidFieldName(std::string_view name) {
  return !name.empty() && name.front() != '$' &&
      name.find_first_of(";.") == std::string_view::npos && isValidUtf8(name);
}

void validateValue(const DocValue& value) {
  switch (value.kind()) {
    case DocKind::kText:
      if (!isValidUtf8(value.as<std::string>())) {
        fail(ErrorCode::kInvalidArgument, "text value is not valid UTF-8");
      }
      break;
    case DocKind::kArray:
      for (const auto& item : value.as<Array>()) {
        validateValue(item);
      }
      break;
    case DocKind::kObject:
      for (const auto& [name, item] : value.as<Object>().fields()) {
        if (!isValidFieldName(name)) {
          fail(
              ErrorCode::kInvalidArgument,
              fmt::format("invalid field name '{}'", name));
        }
        validateValue(item);
      }
      break;
    default:
      break;
  }
}

Document::Document(Object root) : root_(std::move(root)) {
  validateValue(DocValue(root_));
  const DocValue* id = root_.find("_id");
  if (id == nullptr || id->kind() != DocKind::kText) {
    fail(ErrorCode::kInvalidArgument, "document requires a Text _id field");
  }
}

const std::string& Document::id() const {
  return root_.find("_id")->as<std::string>();
}

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

FieldType fieldTypeOf(const DocValue& value) {
  return value.kind();
}

FieldType widen(FieldType a, FieldType b) {
  if (a == FieldType::kNull) {
    return b;
  }
  if (b == FieldType::kNull || a == b) {
    return a;
  }
  int ra = numericRank(a);
  int rb = numericRank(b);
  if (ra > 0 && rb > 0) {
    return ra > rb ? a : b;
  }
  return FieldType::kText;
}

WarehouseType WarehouseType::decimal(int precision, int scale) {
  if (precision < 1 || precision > 38 || scale < 0 || scale > precision) {
    fail(
        ErrorCode::kType,
        fmt::format("invalid DECIMAL({},{})", precision, scale));
  }
  WarehouseType t{Kind::kDecimal};
  t.precision = precision;
  t.scale = scale;
  return t;
}

WarehouseType WarehouseType::fixedChar(int length) {
  if (length < 1 || length > 255) {
    fail(ErrorCode::kType, fmt::format("invalid CHAR({})", length));
  }
  WarehouseType t{Kind::kChar};
  t.length = length;
  return t;
}

std::string WarehouseType::toString() const {
  switch (kind) {
    case Kind::kBoolean:
      return "BOOLEAN";
    case Kind::kTinyint:
      return "TINYINT";
    case Kind::kSmallint:
      return "SMALLINT";
    case Kind::kInt:
      return "INT";
    case Kind::kBigint:
      return "BIGINT";
    case Kind::kFloat:
      return "FLOAT";
    case Kind::kDouble:
      return "DOUBLE";
    case Kind::kDecimal:
      return fmt::format("DECIMAL({},{})", precision, scale);
    case Kind::kChar:
      return fmt::format("CHAR({})", length);
    case Kind::kString:
      return "STRING";
    case Kind::kTimestamp:
      return "TIMESTAMP";
    case Kind::kBinary:
      return "BINARY";
  }
  return "?";
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'a' && c <= 'z') {
      c = static_cast<char>(c - 'a' + 'A');
    }
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<int> parseSmallInt(std::string_view s) {
  s = trim(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

} // namespace

WarehouseType WarehouseType::parse(std::string_view text) {
  std::string name = upper(trim(text));
  static const std::pair<std::string_view, Kind> kSimple[] = {
      {"BOOLEAN", Kind::kBoolean},
      {"TINYINT", Kind::kTinyint},
      {"SMALLINT", Kind::kSmallint},
      {"INT", Kind::kInt},
      {"INTEGER", Kind::kInt},
      {"BIGINT", Kind::kBigint},
      {"FLOAT", Kind::kFloat},
      {"DOUBLE", Kind::kDouble},
      {"STRING", Kind::kString},
      {"TIMESTAMP", Kind::kTimestamp},
      {"BINARY", Kind::kBinary},
  };
  for (const auto& [key, kind] : kSimple) {
    if (name == key) {
      return WarehouseType::of(kind);
    }
  }
  auto open = name.find('(');
  if (open != std::string::npos && name.back() == ')') {
    std::string_view head = trim(std::string_view(name).substr(0, open));
    std::string_view args =
        std::string_view(name).substr(open + 1, name.size() - open - 2);
    if (head == "DECIMAL") {
      auto comma = args.find(',');
      auto p = parseSmallInt(args.substr(0, comma));
      auto s = comma == std::string_view::npos
          ? std::optional<int>(0)
          : parseSmallInt(args.substr(comma + 1));
      if (p && s) {
        return decimal(*p, *s);
      }
    } else if (head == "CHAR") {
      if (auto n = parseSmallInt(args)) {
        return fixedChar(*n);
      }
    }
  }
  if (name == "DECIMAL") {
    return decimal(10, 0);
  }
  fail(ErrorCode::kType, fmt::format("unknown warehouse type '{}'", text));
}

WarehouseType mapType(FieldType type) {
  using K = WarehouseType::Kind;
  switch (type) {
    case FieldType::kNull:
      fail(ErrorCode::kNullType, "Null field type has no warehouse type");
    case FieldType::kBoolean:
      return WarehouseType::of(K::kBoolean);
    case FieldType::kInt32:
      return WarehouseType::of(K::kInt);
    case FieldType::kInt64:
      return WarehouseType::of(K::kBigint);
    case FieldType::kDouble:
      return WarehouseType::of(K::kDouble);
    case FieldType::kText:
    case FieldType::kArray:
    case FieldType::kObject:
      return WarehouseType::of(K::kString);
    case FieldType::kTimestamp:
      return WarehouseType::of(K::kTimestamp);
    case FieldType::kBinary:
      return WarehouseType::of(K::kBinary);
  }
  fail(ErrorCode::kNullType, "unknown field type");
}

// ---------------------------------------------------------------------------
// Schema inference
// ---------------------------------------------------------------------------

const ColumnSpec* InferredSchema::find(std::string_view name) const {
  for (const auto& column : columns) {
    if (column.name == name) {
      return &column;
    }
  }
  return nullptr;
}

void SchemaInferrer::observe(const Document& doc) {
  for (const auto& [name, value] : doc.root().fields()) {
    auto it = std::find_if(
        schema_.columns.begin(),
        schema_.columns.end(),
        [&](const ColumnSpec& c) { return c.name == name; });
    if (it == schema_.columns.end()) {
      schema_.columns.push_back({name, fieldTypeOf(value)});
    } else {
      it->type = widen(it->type, fieldTypeOf(value));
    }
  }
}

InferredSchema inferSchema(std::span<const Document> docs) {
  SchemaInferrer inferrer;
  for (const auto& doc : docs) {
    inferrer.observe(doc);
  }
  return inferrer.schema();
}

InferredSchema removeNullSchema(const InferredSchema& schema) {
  InferredSchema out;
  for (const auto& column : schema.columns) {
    if (column.type != FieldType::kNull) {
      out.columns.push_back(column);
    }
  }
  return out;
}

std::vector<std::string> flattenSchema(const InferredSchema& schema) {
  std::vector<std::string> out;
  out.reserve(schema.columns.size());
  for (const auto& column : schema.columns) {
    if (column.type == FieldType::kNull) {
      fail(
          ErrorCode::kNullColumn,
          fmt::format("column '{}' is Null-typed", column.name));
    }
    out.push_back(
        fmt::format("{};{}", column.name, mapType(column.type).toString()));
  }
  return out;
}

std::pair<std::string, WarehouseType> parseFlattenedColumn(
    std::string_view column) {
  auto sep = column.find(';');
  if (sep == std::string_view::npos || sep == 0) {
    fail(
        ErrorCode::kInvalidArgument,
        fmt::format("malformed flattened column '{}'", column));
  }
  return {
      std::string(column.substr(0, sep)),
      WarehouseType::parse(column.substr(sep + 1))};
}

DocValue toColumnValue(const DocValue& value, FieldType columnType) {
  if (value.isNull()) {
    return value;
  }
  switch (columnType) {
    case FieldType::kText:
    case FieldType::kArray:
    case FieldType::kObject:
      if (value.kind() == DocKind::kText) {
        return value;
      }
      return DocValue(toCanonicalJson(value));
    case FieldType::kInt64:
      if (value.kind() == DocKind::kInt32) {
        return DocValue(static_cast<int64_t>(value.as<int32_t>()));
      }
      return value;
    case FieldType::kDouble:
      if (value.kind() == DocKind::kInt32) {
        return DocValue(static_cast<double>(value.as<int32_t>()));
      }
      if (value.kind() == DocKind::kInt64) {
        return DocValue(static_cast<double>(value.as<int64_t>()));
      }
      return value;
    default:
      return value;
  }
}

// ---------------------------------------------------------------------------
// Binary encoding
// ---------------------------------------------------------------------------

namespace {

template <typename T>
void putBigEndian(T v, std::vector<uint8_t>& out) {
  auto u = static_cast<std::make_unsigned_t<T>>(v);
  for (int shift = (sizeof(T) - 1) * 8; shift >= 0; shift -= 8) {
    out.push_back(static_cast<uint8_t>(u >> shift));
  }
}

void putLength(size_t n, std::vector<uint8_t>& out) {
  if (n > std::numeric_limits<uint32_t>::max()) {
    fail(ErrorCode::kInvalidArgument, "value too large to encode");
  }
  putBigEndian(static_cast<uint32_t>(n), out);
}

void putBytes(std::string_view bytes, std::vector<uint8_t>& out) {
  putLength(bytes.size(), out);
  out.insert(out.end(), bytes.begin(), bytes.end());
}

class Decoder {
 public:
  explicit Decoder(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  DocValue value(int depth = 0) {
    if (depth > 512) {
      bad("nesting too deep");
    }
    auto tag = static_cast<DocKind>(take(1)[0]);
    switch (tag) {
      case DocKind::kNull:
        return DocValue();
      case DocKind::kBoolean: {
        uint8_t b = take(1)[0];
        if (b > 1) {
          bad("boolean payload");
        }
        return DocValue(b == 1);
      }
      case DocKind::kInt32:
        return DocValue(static_cast<int32_t>(fixed<uint32_t>()));
      case DocKind::kInt64:
        return DocValue(static_cast<int64_t>(fixed<uint64_t>()));
      case DocKind::kDouble:
        return DocValue(std::bit_cast<double>(fixed<uint64_t>()));
      case DocKind::kText: {
        auto s = bytes();
        std::string text(s.begin(), s.end());
        if (!isValidUtf8(text)) {
          bad("text is not UTF-8");
        }
        return DocValue(std::move(text));
      }
      case DocKind::kTimestamp:
        return DocValue(Timestamp{static_cast<int64_t>(fixed<uint64_t>())});
      case DocKind::kBinary: {
        auto s = bytes();
        return DocValue(Binary(s.begin(), s.end()));
      }
      case DocKind::kArray: {
        uint32_t n = fixed<uint32_t>();
        Array items;
        for (uint32_t i = 0; i < n; ++i) {
          items.push_back(value(depth + 1));
        }
        return DocValue(std::move(items));
      }
      case DocKind::kObject: {
        uint32_t n = fixed<uint32_t>();
        Object object;
        std::string previous;
        for (uint32_t i = 0; i < n; ++i) {
          auto k = bytes();
          std::string key(k.begin(), k.end());
          if (i > 0 && !(previous < key)) {
            bad("object keys not in canonical order");
          }
          if (!isValidFieldName(key)) {
            bad("invalid field name");
          }
          object.set(key, value(depth + 1));
          previous = std::move(key);
        }
        return DocValue(std::move(object));
      }
    }
    bad("unknown tag");
  }

  bool done() const {
    return pos_ == bytes_.size();
  }

 private:
  [[noreturn]] void bad(const char* what) {
    fail(
        ErrorCode::kInvalidArgument,
        fmt::format("canonical decode at byte {}: {}", pos_, what));
  }

  std::span<const uint8_t> take(size_t n) {
    if (bytes_.size() - pos_ < n) {
      bad("truncated input");
    }
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  template <typename U>
  U fixed() {
    auto raw = take(sizeof(U));
    U v = 0;
    for (uint8_t b : raw) {
      v = static_cast<U>((v << 8) | b);
    }
    return v;
  }

  std::span<const uint8_t> bytes() {
    return take(fixed<uint32_t>());
  }

  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

} // namespace

void canonicalEncodeTo(const DocValue& value, std::vector<uint8_t>& out) {
  out.push_back(static_cast<uint8_t>(value.kind()));
  switch (value.kind()) {
    case DocKind::kNull:
      break;
    case DocKind::kBoolean:
      out.push_back(value.as<bool>() ? 1 : 0);
      break;
    case DocKind::kInt32:
      putBigEndian(value.as<int32_t>(), out);
      break;
    case DocKind::kInt64:
      putBigEndian(value.as<int64_t>(), out);
      break;
    case DocKind::kDouble:
      putBigEndian(std::bit_cast<uint64_t>(value.as<double>()), out);
      break;
    case DocKind::kText:
      putBytes(value.as<std::string>(), out);
      break;
    case DocKind::kTimestamp:
      putBigEndian(value.as<Timestamp>().millis, out);
      break;
    case DocKind::kBinary: {
      const auto& bin = value.as<Binary>();
      putLength(bin.size(), out);
      out.insert(out.end(), bin.begin(), bin.end());
      break;
    }
    case DocKind::kArray: {
      const auto& items = value.as<Array>();
      putLength(items.size(), out);
      for (const auto& item : items) {
        canonicalEncodeTo(item, out);
      }
      break;
    }
    case DocKind::kObject: {
      const auto& object = value.as<Object>();
      putLength(object.size(), out);
      for (const auto* field : object.sortedFields()) {
        putBytes(field->first, out);
        canonicalEncodeTo(field->second, out);
      }
      break;
    }
  }
}

DocValue integerValue(int64_t v) {
  if (v >= std::numeric_limits<int32_t>::min() && v <= std::numeric_limits<int32_t>::max()) {
    return DocValue(static_cast<int32_t>(v));
  }
  return DocValue(v);
}

std::vector<uint8_t> canonicalEncode(const DocValue& value) {
  std::vector<uint8_t> out;
  canonicalEncodeTo(value, out);
  return out;
}

DocValue canonicalDecode(std::span<const uint8_t> bytes) {
  Decoder decoder(bytes);
  DocValue value = decoder.value();
  if (!decoder.done()) {
    fail(ErrorCode::kInvalidArgument, "trailing bytes after canonical value");
  }
  return value;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

std::string base64Encode(std::span<const uint8_t> bytes) {
  using namespace boost::archive::iterators;
  using It = base64_from_binary<transform_width<const uint8_t*, 6, 8>>;
  std::string out(It(bytes.data()), It(bytes.data() + bytes.size()));
  out.append((3 - bytes.size() % 3) % 3, '=');
  return out;
}

Binary base64Decode(std::string_view text) {
  using namespace boost::archive::iterators;
  using It = transform_width<binary_from_base64<const char*>, 8, 6>;
  if (text.size() % 4 != 0) {
    fail(ErrorCode::kInvalidArgument, "base64 length not a multiple of 4");
  }
  size_t padding = 0;
  while (padding < 2 && padding < text.size() &&
         text[text.size() - 1 - padding] == '=') {
    ++padding;
  }
  std::string_view body = text.substr(0, text.size() - padding);
  for (char c : body) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '/') {
      fail(ErrorCode::kInvalidArgument, "invalid base64 character");
    }
  }
  Binary out(It(body.data()), It(body.data() + body.size()));
  // The iterator may emit a trailing partial byte for padded input.
  out.resize(text.size() / 4 * 3 - padding);
  return out;
}

namespace {

void appendJsonString(std::string_view s, std::string& out) {
  out.push_back('"');
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\b':
        out += "\\b";
        break;
      case '\f':
        out += "\\f";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (c < 0x20) {
          out += fmt::format("\\u{:04x}", c);
        } else {
          out.push_back(ch);
        }
    }
  }
  out.push_back('"');
}

void appendDouble(double d, std::string& out) {
  if (std::isnan(d)) {
    out += R"({"$f64":"nan"})";
    return;
  }
  if (std::isinf(d)) {
    out += d > 0 ? R"({"$f64":"inf"})" : R"({"$f64":"-inf"})";
    return;
  }
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  std::string_view text(buf, end - buf);
  out += text;
  if (text.find_first_of(".e") == std::string_view::npos) {
    out += ".0";
  }
}

using OrderedJson = nlohmann::ordered_json;

DocValue fromJson(const OrderedJson& j) {
  switch (j.type()) {
    case OrderedJson::value_t::null:
      return DocValue();
    case OrderedJson::value_t::boolean:
      return DocValue(j.get<bool>());
    case OrderedJson::value_t::number_integer:
    case OrderedJson::value_t::number_unsigned: {
      if (j.is_number_unsigned() &&
          j.get<uint64_t>() >
              static_cast<uint64_t>(std::numeric_limits<int64_t>::max())) {
        fail(ErrorCode::kInvalidArgument, "integer exceeds signed 64 bits");
      }
      auto v = j.get<int64_t>();
      if (v >= std::numeric_limits<int32_t>::min() &&
          v <= std::numeric_limits<int32_t>::max()) {
        return DocValue(static_cast<int32_t>(v));
      }
      return DocValue(v);
    }
    case OrderedJson::value_t::number_float:
      return DocValue(j.get<double>());
    case OrderedJson::value_t::string:
      return DocValue(j.get<std::string>());
    case OrderedJson::value_t::array: {
      Array items;
      items.reserve(j.size());
      for (const auto& item : j) {
        items.push_back(fromJson(item));
      }
      return DocValue(std::move(items));
    }
    case OrderedJson::value_t::object: {
      if (j.size() == 1) {
        const auto& [key, inner] = *j.items().begin();
        if (key == "$ts" && inner.is_number_integer()) {
          return DocValue(Timestamp{inner.get<int64_t>()});
        }
        if (key == "$i64" && inner.is_number_integer()) {
          return DocValue(inner.get<int64_t>());
        }
        if (key == "$bin" && inner.is_string()) {
          return DocValue(base64Decode(inner.get<std::string>()));
        }
        if (key == "$f64" && inner.is_string()) {
          const auto& s = inner.get_ref<const std::string&>();
          if (s == "nan") {
            return DocValue(std::numeric_limits<double>::quiet_NaN());
          }
          if (s == "inf") {
            return DocValue(std::numeric_limits<double>::infinity());
          }
          if (s == "-inf") {
            return DocValue(-std::numeric_limits<double>::infinity());
          }
        }
      }
      Object object;
      for (const auto& [key, inner] : j.items()) {
        if (!isValidFieldName(key)) {
          fail(
              ErrorCode::kInvalidArgument,
              fmt::format("invalid field name '{}'", key));
        }
        if (object.contains(key)) {
          fail(
              ErrorCode::kInvalidArgument,
              fmt::format("duplicate field name '{}'", key));
        }
        object.set(key, fromJson(inner));
      }
      return DocValue(std::move(object));
    }
    default:
      fail(ErrorCode::kInvalidArgument, "unsupported JSON value");
  }
}

} // namespace

void appendCanonicalJson(const DocValue& value, std::string& out) {
  switch (value.kind()) {
    case DocKind::kNull:
      out += "null";
      break;
    case DocKind::kBoolean:
      out += value.as<bool>() ? "true" : "false";
      break;
    case DocKind::kInt32:
      out += std::to_string(value.as<int32_t>());
      break;
    case DocKind::kInt64: {
      int64_t v = value.as<int64_t>();
      if (v >= std::numeric_limits<int32_t>::min() &&
          v <= std::numeric_limits<int32_t>::max()) {
        out += fmt::format(R"({{"$i64":{}}})", v);
      } else {
        out += std::to_string(v);
      }
      break;
    }
    case DocKind::kDouble:
      appendDouble(value.as<double>(), out);
      break;
    case DocKind::kText:
      appendJsonString(value.as<std::string>(), out);
      break;
    case DocKind::kTimestamp:
      out += fmt::format(R"({{"$ts":{}}})", value.as<Timestamp>().millis);
      break;
    case DocKind::kBinary:
      out += R"({"$bin":")";
      out += base64Encode(value.as<Binary>());
      out += "\"}";
      break;
    case DocKind::kArray: {
      out.push_back('[');
      bool first = true;
      for (const auto& item : value.as<Array>()) {
        if (!first) {
          out.push_back(',');
        }
        first = false;
        appendCanonicalJson(item, out);
      }
      out.push_back(']');
      break;
    }
    case DocKind::kObject: {
      out.push_back('{');
      bool first = true;
      for (const auto* field : value.as<Object>().sortedFields()) {
        if (!first) {
          out.push_back(',');
        }
        first = false;
        appendJsonString(field->first, out);
        out.push_back(':');
        appendCanonicalJson(field->second, out);
      }
      out.push_back('}');
      break;
    }
  }
}

std::string toCanonicalJson(const DocValue& value) {
  std::string out;
  appendCanonicalJson(value, out);
  return out;
}

DocValue parseJson(std::string_view text) {
  OrderedJson j;
  try {
    j = OrderedJson::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, fmt::format("bad JSON: {}", e.what()));
  }
  return fromJson(j);
}

} // namespace ncwc
