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

#include <gtest/gtest.h>

#include "ncwc/hql.h"
#include "support/test_support.h"

namespace ncwc::hql {
namespace {

using K = WarehouseType::Kind;

ParseError parseError(std::string_view text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for: " << text;
  return ParseError(0, 0, {}, "");
}

TEST(HqlParseTest, SelectAll) {
  EXPECT_EQ(parse("select * from t1"), Statement(SelectAll{{std::nullopt, "t1"}, std::nullopt}));
  EXPECT_EQ(parse("SELECT * FROM db.t LIMIT 5"), Statement(SelectAll{{"db", "t"}, 5}));
  EXPECT_EQ(parse("select * from hiveTableName "), Statement(SelectAll{{std::nullopt, "hiveTableName"}, std::nullopt}));
  EXPECT_EQ(parse("  sElEcT\n*\tfrom t "), Statement(SelectAll{{std::nullopt, "t"}, std::nullopt}));
}

TEST(HqlParseTest, Describe) {
  EXPECT_EQ(parse("describe extended t1"), Statement(Describe{true, {std::nullopt, "t1"}}));
  EXPECT_EQ(parse("DESCRIBE t1"), Statement(Describe{false, {std::nullopt, "t1"}}));
  // A table may be called "extended".
  EXPECT_EQ(parse("describe extended"), Statement(Describe{false, {std::nullopt, "extended"}}));
  EXPECT_EQ(parse("describe extended db.x"), Statement(Describe{true, {"db", "x"}}));
}

TEST(HqlParseTest, ShowAndDrop) {
  EXPECT_EQ(parse("show tables"), Statement(ShowTables{}));
  EXPECT_EQ(parse("SHOW DATABASES"), Statement(ShowDatabases{}));
  EXPECT_EQ(parse("drop table if exists nope"), Statement(DropTable{true, {std::nullopt, "nope"}}));
  EXPECT_EQ(parse("DROP TABLE d.t"), Statement(DropTable{false, {"d", "t"}}));
}

TEST(HqlParseTest, CreateTable) {
  CreateTable expected;
  expected.ifNotExists = true;
  expected.name = "t";
  expected.columns = {
      {"x", WarehouseType::of(K::kBigint)},
      {"price", WarehouseType::decimal(10, 2)},
      {"code", WarehouseType::fixedChar(3)}};
  expected.buckets = BucketSpec{{"x", "code"}, 8};
  EXPECT_EQ(
      parse("create table if not exists t (x bigint, price decimal(10, 2), code char(3)) "
            "clustered by (x, code) into 8 buckets"),
      Statement(expected));
  EXPECT_EQ(
      parse("CREATE TABLE t (x BIGINT)"),
      Statement(CreateTable{false, "t", {{"x", WarehouseType::of(K::kBigint)}}, std::nullopt}));
}

TEST(HqlParseTest, KeywordsAreNotReserved) {
  EXPECT_EQ(parse("select * from select"), Statement(SelectAll{{std::nullopt, "select"}, std::nullopt}));
  EXPECT_EQ(parse("drop table table"), Statement(DropTable{false, {std::nullopt, "table"}}));
}

TEST(HqlParseTest, ProjectionIsRejected) {
  auto e = parseError("select x from t");
  EXPECT_EQ(e.code(), ErrorCode::kParse);
  EXPECT_EQ(e.line(), 1);
  EXPECT_EQ(e.column(), 8);
  EXPECT_EQ(e.expected(), std::vector<std::string>{"'*'"});
}

TEST(HqlParseTest, ErrorPositions) {
  struct Case {
    std::string text;
    int line;
    int column;
  };
  const Case cases[] = {
      {"", 1, 1},
      {"selec * from t", 1, 1},
      {"select * from", 1, 14},
      {"select * from t limit", 1, 22},
      {"select * from t limit -1", 1, 23},
      {"select * from t extra", 1, 17},
      {"show\n  columns", 2, 3},
      {"describe", 1, 9},
      {"create table t ()", 1, 17},
      {"create table t (x notatype)", 1, 19},
      {"select * from t;", 1, 16},
      {"create table t (x int) clustered by (x) into 0 buckets", 1, 46},
      {"drop table if t", 1, 15},
      {"select * from db.", 1, 18},
      {"select * from 1t", 1, 15},
  };
  for (const auto& c : cases) {
    auto e = parseError(c.text);
    EXPECT_EQ(e.line(), c.line) << c.text;
    EXPECT_EQ(e.column(), c.column) << c.text;
    EXPECT_FALSE(e.expected().empty()) << c.text;
    EXPECT_NE(std::string(e.what()).find("E_PARSE"), std::string::npos);
  }
}

TEST(HqlParseTest, ExpectedSetAtStatementStart) {
  auto e = parseError("update t");
  EXPECT_EQ(
      e.expected(),
      (std::vector<std::string>{"SELECT", "DESCRIBE", "SHOW", "DROP", "CREATE"}));
}

TEST(HqlRenderTest, RoundTrip) {
  const char* statements[] = {
      "select * from t",
      "select * from db.t limit 0",
      "describe extended t",
      "describe db.extended",
      "show tables",
      "show databases",
      "drop table if exists db.t",
      "drop table t",
      "create table t (a int, b string, c decimal(5,2), d char(1), e timestamp)",
      "create table if not exists t (a int) clustered by (a) into 4 buckets",
  };
  for (const char* text : statements) {
    Statement s = parse(text);
    std::string rendered = render(s);
    EXPECT_EQ(parse(rendered), s) << text;
    EXPECT_EQ(render(parse(rendered)), rendered);
  }
  EXPECT_EQ(render(parse("select * from t limit 3")), "SELECT * FROM t LIMIT 3");
  EXPECT_EQ(render(parse("describe extended t")), "DESCRIBE EXTENDED t");
}

} // namespace
} // namespace ncwc::hql
