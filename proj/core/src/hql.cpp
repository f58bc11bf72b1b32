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

#include "ncwc/hql.h"

#include <cctype>
#include <charconv>
#include <limits>

#include <fmt/format.h>

#include "ncwc/identifier.h"

namespace ncwc::hql {

namespace {

enum class TokenKind { kWord, kNumber, kSymbol, kInvalid, kEnd };

struct Token {
  TokenKind kind;
  std::string_view text;
  int line;
  int column;
};

std::string describeToken(const Token& t) {
  switch (t.kind) {
    case TokenKind::kEnd:
      return "end of input";
    case TokenKind::kInvalid:
      return fmt::format("invalid character '{}'", t.text);
    default:
      return fmt::format("'{}'", t.text);
  }
}

std::string joinExpected(const std::vector<std::string>& expected) {
  std::string out;
  for (size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) {
      out += i + 1 == expected.size() ? " or " : ", ";
    }
    out += expected[i];
  }
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  int line = 1;
  int column = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (text[i + k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    i += n;
  };
  while (i < text.size()) {
    char c = text[i];
    auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      advance(1);
      continue;
    }
    size_t start = i;
    int startLine = line;
    int startColumn = column;
    if (std::isalpha(uc) || c == '_') {
      size_t end = i;
      while (end < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[end])) ||
              text[end] == '_')) {
        ++end;
      }
      tokens.push_back(
          {TokenKind::kWord, text.substr(start, end - start), startLine, startColumn});
      advance(end - start);
    } else if (std::isdigit(uc)) {
      size_t end = i;
      while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) {
        ++end;
      }
      tokens.push_back(
          {TokenKind::kNumber, text.substr(start, end - start), startLine, startColumn});
      advance(end - start);
    } else if (c == '*' || c == '.' || c == '(' || c == ')' || c == ',') {
      tokens.push_back({TokenKind::kSymbol, text.substr(start, 1), startLine, startColumn});
      advance(1);
    } else {
      tokens.push_back({TokenKind::kInvalid, text.substr(start, 1), startLine, startColumn});
      advance(1);
    }
  }
  tokens.push_back({TokenKind::kEnd, {}, line, column});
  return tokens;
}

bool equalsIgnoreCase(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) {
    return false;
  }
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(a[i])) !=
        std::toupper(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

const std::vector<std::string>& typeNames() {
  static const std::vector<std::string> names = {
      "BOOLEAN", "TINYINT", "SMALLINT", "INT", "INTEGER", "BIGINT", "FLOAT",
      "DOUBLE", "DECIMAL", "CHAR", "STRING", "TIMESTAMP", "BINARY"};
  return names;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  Statement statement() {
    Statement out = [&]() -> Statement {
      if (acceptKeyword("SELECT")) {
        return selectAll();
      }
      if (acceptKeyword("DESCRIBE")) {
        return describe();
      }
      if (acceptKeyword("SHOW")) {
        return show();
      }
      if (acceptKeyword("DROP")) {
        return dropTable();
      }
      if (acceptKeyword("CREATE")) {
        return createTable();
      }
      error({"SELECT", "DESCRIBE", "SHOW", "DROP", "CREATE"});
    }();
    if (peek().kind != TokenKind::kEnd) {
      error({"end of input"});
    }
    return out;
  }

 private:
  const Token& peek(size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }

  [[noreturn]] void error(std::vector<std::string> expected) {
    const Token& t = peek();
    throw ParseError(t.line, t.column, std::move(expected), describeToken(t));
  }

  bool isKeyword(const Token& t, std::string_view keyword) const {
    return t.kind == TokenKind::kWord && equalsIgnoreCase(t.text, keyword);
  }

  bool acceptKeyword(std::string_view keyword) {
    if (isKeyword(peek(), keyword)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expectKeyword(std::string_view keyword) {
    if (!acceptKeyword(keyword)) {
      error({std::string(keyword)});
    }
  }

  bool acceptSymbol(char symbol) {
    const Token& t = peek();
    if (t.kind == TokenKind::kSymbol && t.text[0] == symbol) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expectSymbol(char symbol) {
    if (!acceptSymbol(symbol)) {
      error({fmt::format("'{}'", symbol)});
    }
  }

  std::string identifier(std::string_view what = "identifier") {
    const Token& t = peek();
    if (t.kind != TokenKind::kWord || !isValidIdentifier(t.text)) {
      error({std::string(what)});
    }
    ++pos_;
    return std::string(t.text);
  }

  int64_t integer() {
    const Token& t = peek();
    int64_t value = 0;
    if (t.kind == TokenKind::kNumber) {
      auto [ptr, ec] =
          std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
      if (ec == std::errc() && ptr == t.text.data() + t.text.size()) {
        ++pos_;
        return value;
      }
    }
    error({"integer"});
  }

  QualifiedName qualifiedName() {
    QualifiedName name;
    name.name = identifier();
    if (acceptSymbol('.')) {
      name.database = std::move(name.name);
      name.name = identifier();
    }
    return name;
  }

  SelectAll selectAll() {
    expectSymbol('*');
    expectKeyword("FROM");
    SelectAll s;
    s.table = qualifiedName();
    if (acceptKeyword("LIMIT")) {
      s.limit = integer();
    } else if (peek().kind != TokenKind::kEnd) {
      error({"'.'", "LIMIT", "end of input"});
    }
    return s;
  }

  Describe describe() {
    Describe d;
    // "describe extended" is ambiguous with a table named "extended"; the
    // keyword wins when another name follows.
    if (isKeyword(peek(), "EXTENDED") && peek(1).kind == TokenKind::kWord) {
      ++pos_;
      d.extended = true;
    }
    d.table = qualifiedName();
    return d;
  }

  Statement show() {
    if (acceptKeyword("TABLES")) {
      return ShowTables{};
    }
    if (acceptKeyword("DATABASES")) {
      return ShowDatabases{};
    }
    error({"TABLES", "DATABASES"});
  }

  DropTable dropTable() {
    expectKeyword("TABLE");
    DropTable d;
    if (acceptKeyword("IF")) {
      expectKeyword("EXISTS");
      d.ifExists = true;
    }
    d.table = qualifiedName();
    return d;
  }

  WarehouseType columnType() {
    const Token& t = peek();
    if (t.kind != TokenKind::kWord) {
      error(typeNames());
    }
    std::string name(t.text);
    for (auto& c : name) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    bool known = false;
    for (const auto& n : typeNames()) {
      known = known || n == name;
    }
    if (!known) {
      error(typeNames());
    }
    ++pos_;
    if (name == "DECIMAL") {
      if (!acceptSymbol('(')) {
        return WarehouseType::decimal(10, 0);
      }
      const Token& at = peek();
      int64_t precision = integer();
      int64_t scale = 0;
      if (acceptSymbol(',')) {
        scale = integer();
      }
      expectSymbol(')');
      if (precision > 38 || scale > precision || precision < 1) {
        throw ParseError(
            at.line, at.column, {"DECIMAL precision 1..38 and scale <= precision"},
            fmt::format("DECIMAL({},{})", precision, scale));
      }
      return WarehouseType::decimal(
          static_cast<int>(precision), static_cast<int>(scale));
    }
    if (name == "CHAR") {
      expectSymbol('(');
      const Token& at = peek();
      int64_t length = integer();
      expectSymbol(')');
      if (length < 1 || length > 255) {
        throw ParseError(
            at.line, at.column, {"CHAR length 1..255"},
            fmt::format("CHAR({})", length));
      }
      return WarehouseType::fixedChar(static_cast<int>(length));
    }
    return WarehouseType::parse(name);
  }

  CreateTable createTable() {
    expectKeyword("TABLE");
    CreateTable c;
    if (acceptKeyword("IF")) {
      expectKeyword("NOT");
      expectKeyword("EXISTS");
      c.ifNotExists = true;
    }
    c.name = identifier();
    expectSymbol('(');
    do {
      Column column;
      column.name = identifier("column name");
      column.type = columnType();
      c.columns.push_back(std::move(column));
    } while (acceptSymbol(','));
    if (!acceptSymbol(')')) {
      error({"','", "')'"});
    }
    if (acceptKeyword("CLUSTERED")) {
      expectKeyword("BY");
      expectSymbol('(');
      BucketSpec spec;
      do {
        spec.columns.push_back(identifier("column name"));
      } while (acceptSymbol(','));
      if (!acceptSymbol(')')) {
        error({"','", "')'"});
      }
      expectKeyword("INTO");
      const Token& at = peek();
      int64_t buckets = integer();
      if (buckets < 1 || buckets > std::numeric_limits<int>::max()) {
        throw ParseError(at.line, at.column, {"bucket count >= 1"}, std::string(at.text));
      }
      spec.numBuckets = static_cast<int>(buckets);
      expectKeyword("BUCKETS");
      c.buckets = std::move(spec);
    } else if (peek().kind != TokenKind::kEnd) {
      error({"CLUSTERED", "end of input"});
    }
    return c;
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

std::string renderName(const QualifiedName& name) {
  return name.database ? *name.database + "." + name.name : name.name;
}

} // namespace

ParseError::ParseError(
    int line,
    int column,
    std::vector<std::string> expected,
    std::string found)
    : Error(
          ErrorCode::kParse,
          fmt::format(
              "line {}, column {}: expected {}, found {}",
              line,
              column,
              joinExpected(expected),
              found)),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

Statement parse(std::string_view text) {
  return Parser(text).statement();
}

std::string render(const Statement& statement) {
  struct Renderer {
    std::string operator()(const SelectAll& s) const {
      std::string out = "SELECT * FROM " + renderName(s.table);
      if (s.limit) {
        out += fmt::format(" LIMIT {}", *s.limit);
      }
      return out;
    }
    std::string operator()(const Describe& d) const {
      return std::string("DESCRIBE ") + (d.extended ? "EXTENDED " : "") +
          renderName(d.table);
    }
    std::string operator()(const ShowTables&) const {
      return "SHOW TABLES";
    }
    std::string operator()(const ShowDatabases&) const {
      return "SHOW DATABASES";
    }
    std::string operator()(const DropTable& d) const {
      return std::string("DROP TABLE ") + (d.ifExists ? "IF EXISTS " : "") +
          renderName(d.table);
    }
    std::string operator()(const CreateTable& c) const {
      std::string out = std::string("CREATE TABLE ") +
          (c.ifNotExists ? "IF NOT EXISTS " : "") + c.name + " (";
      for (size_t i = 0; i < c.columns.size(); ++i) {
        if (i > 0) {
          out += ", ";
        }
        out += c.columns[i].name + " " + c.columns[i].type.toString();
      }
      out += ")";
      if (c.buckets) {
        out += " CLUSTERED BY (";
        for (size_t i = 0; i < c.buckets->columns.size(); ++i) {
          if (i > 0) {
            out += ", ";
          }
          out += c.buckets->columns[i];
        }
        out += fmt::format(") INTO {} BUCKETS", c.buckets->numBuckets);
      }
      return out;
    }
  };
  return std::visit(Renderer{}, statement);
}

} // namespace ncwc::hql
