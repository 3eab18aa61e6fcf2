#include <gtest/gtest.h>

#include <sstream>

#include "smmd/io.hpp"

TEST(Csv, HeaderBlankLinesAndValues) {
  std::istringstream in("x,y\n1,2\n\n -3.5, 4e-1 \n");
  const smmd::Matrix m = smmd::read_csv_matrix(in);
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 2);
  EXPECT_EQ(m(1, 0), -3.5);
  EXPECT_EQ(m(1, 1), 0.4);
}

TEST(Csv, ErrorsNameRowAndColumn) {
  std::istringstream bad("1,2\n3,oops\n");
  try {
    smmd::read_csv_matrix(bad, "f.csv");
    FAIL();
  } catch (const smmd::ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2, column 2"), std::string::npos);
  }
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(smmd::read_csv_matrix(ragged), smmd::ParseError);
  std::istringstream empty("");
  EXPECT_THROW(smmd::read_csv_matrix(empty), smmd::ParseError);
  std::istringstream header_only("a,b\n");
  EXPECT_THROW(smmd::read_csv_matrix(header_only), smmd::ParseError);
  std::istringstream wrong_dim("1,2\n");
  EXPECT_THROW(smmd::read_csv_matrix(wrong_dim, "x", 3), smmd::ParseError);
}

TEST(Json, FixedKeysAndDigits) {
  const std::string s = smmd::to_json({{"a", 0.1}, {"b", std::int64_t{3}}, {"c", true}, {"d", std::string("x\"y")}});
  EXPECT_EQ(s, "{\"a\": 0.10000000000000001, \"b\": 3, \"c\": true, \"d\": \"x\\\"y\"}");
}

TEST(Table, CsvAndJson) {
  smmd::Table t;
  t.columns = {"k", "v"};
  t.add_row({std::string("a"), 1.5});
  EXPECT_THROW(t.add_row({std::string("a")}), std::logic_error);
  std::ostringstream csv, json;
  t.write_csv(csv);
  t.write_json(json);
  EXPECT_EQ(csv.str(), "k,v\na,1.5\n");
  EXPECT_EQ(json.str(), "[\n {\"k\": \"a\", \"v\": 1.5}\n]\n");
}
