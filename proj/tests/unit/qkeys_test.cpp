#include <gtest/gtest.h>

#include <thread>

#include "expect_error.hpp"
#include "linkstate/qkeys.hpp"
#include "linkstate/state_json.hpp"

using namespace linkstate;
using linkstate::testing::code_of;
using namespace linkstate::qkeys;

namespace {

std::string fixture(const char* name) { return std::string(LINKSTATE_FIXTURES_DIR) + "/" + name; }


}  // namespace

TEST(QKeys, InterningIsIdempotent) {
  KeyManager m;
  auto a = m.get("Town", "Lowell");
  auto b = m.get("Town", "Lowell");
  EXPECT_EQ(a.id(), b.id());
  EXPECT_EQ(a.key_type(), "Town");
  EXPECT_EQ(a.local_name(), "Lowell");
  EXPECT_EQ(m.size(), 1u);
}

TEST(QKeys, KeyTypeQualifies) {
  KeyManager m;
  EXPECT_NE(m.get("Town", "Lowell").id(), m.get("School", "Lowell").id());
  EXPECT_FALSE(m.get("Town", "Lowell") == m.get("School", "Lowell"));
}

TEST(QKeys, EmptyComponents) {
  KeyManager m;
  EXPECT_EQ(code_of([&] { m.get("", "x"); }), Errc::kEmptyComponent);
  EXPECT_EQ(code_of([&] { m.get("Town", ""); }), Errc::kEmptyComponent);
  EXPECT_FALSE(m.find("Town", "x").has_value());
}

TEST(QKeys, ConcurrentInterningIsABijection) {
  KeyManager m;
  std::vector<std::thread> threads;
  std::vector<std::vector<std::uint64_t>> ids(4);
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 500; ++i) ids[t].push_back(m.get(i % 2 ? "A" : "B", std::to_string(i % 100)).id());
    });
  }
  for (auto& th : threads) th.join();
  for (int t = 1; t < 4; ++t) EXPECT_EQ(ids[t], ids[0]);
  EXPECT_EQ(m.size(), 100u);
}

TEST(QKeys, ColumnRejectsForeignKeys) {
  KeyManager m;
  KeyedColumn col("Town", "pop");
  EXPECT_TRUE(col.set(m.get("Town", "Lowell"), 1));
  EXPECT_FALSE(col.set(m.get("Town", "Lowell"), 2));
  EXPECT_EQ(col.get(m.get("Town", "Lowell"))->as_number(), 2.0);
  EXPECT_EQ(code_of([&] { col.set(m.get("School", "Lowell"), 3); }), Errc::kKeyTypeMismatch);
}

TEST(QKeys, JoinUnionWithNulls) {
  KeyManager m;
  KeyedColumn c1("Town", "a"), c2("Town", "b");
  c1.set(m.get("Town", "Lowell"), 1);
  c1.set(m.get("Town", "Boston"), 2);
  c2.set(m.get("Town", "Boston"), 9);
  JoinedTable t = join_columns({&c1, &c2});
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].key.local_name(), "Boston");
  EXPECT_EQ(encode(StateNode(StateList(t.rows[0].values))), "[2,9]");
  EXPECT_EQ(t.rows[1].key.local_name(), "Lowell");
  EXPECT_EQ(encode(StateNode(StateList(t.rows[1].values))), "[1,null]");
  EXPECT_EQ(t.to_csv(), "key,a,b\nBoston,2,9\nLowell,1,\n");
}

TEST(QKeys, CrossTypeJoinRejected) {
  KeyManager m;
  KeyedColumn towns("Town", "a"), schools("School", "b");
  EXPECT_EQ(code_of([&] { join_columns({&towns, &schools}); }), Errc::kKeyTypeMismatch);
  EXPECT_EQ(code_of([&] { join_columns({}); }), Errc::kValue);
}

TEST(QKeys, SingleColumnIsIdentity) {
  KeyManager m;
  KeyedColumn c("Town", "v");
  c.set(m.get("Town", "b"), "2");
  c.set(m.get("Town", "a"), "1");
  EXPECT_EQ(join_columns({&c}).to_csv(), "key,v\na,1\nb,2\n");
}

TEST(Csv, LoadsColumn) {
  KeyManager m;
  CsvColumn c = load_csv_column(m, fixture("towns-population.csv"), "town", "population", "Town");
  EXPECT_EQ(c.column.size(), 3u);
  EXPECT_EQ(c.column.title(), "population");
  EXPECT_TRUE(c.diagnostics.empty());
  EXPECT_EQ(c.column.get(m.get("Town", "Worcester, MA"))->as_text(), "206518");
}

TEST(Csv, DuplicateKeysLastWins) {
  KeyManager m;
  CsvColumn c = load_csv_column(m, fixture("duplicate-keys.csv"), "town", "population", "Town");
  EXPECT_EQ(c.column.size(), 2u);
  EXPECT_EQ(c.diagnostics.size(), 1u);
  EXPECT_EQ(c.column.get(m.get("Town", "Lowell"))->as_text(), "2");
}

TEST(Csv, QuotedFieldsAndCrlf) {
  KeyManager m;
  CsvColumn c = load_csv_column(m, fixture("quoted.csv"), "town", "value", "Town");
  EXPECT_EQ(c.column.size(), 2u);
  EXPECT_NE(c.column.get(m.get("Town", "a \"quoted\" name")), nullptr);
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("plain"), "plain");
}

TEST(Csv, Errors) {
  KeyManager m;
  EXPECT_EQ(code_of([&] { load_csv_column(m, fixture("towns-population.csv"), "town", "nope", "Town"); }),
            Errc::kMissingColumn);
  EXPECT_EQ(code_of([&] { load_csv_column(m, fixture("absent.csv"), "a", "b", "Town"); }), Errc::kFileNotFound);
  EXPECT_EQ(code_of([&] { parse_csv("a,b\n\"open,1\n"); }), Errc::kParse);
}

TEST(Csv, JoinAcrossFiles) {
  KeyManager m;
  CsvColumn pop = load_csv_column(m, fixture("towns-population.csv"), "town", "population", "Town");
  CsvColumn sch = load_csv_column(m, fixture("towns-schools.csv"), "name", "schools", "Town");
  EXPECT_EQ(join_columns({&pop.column, &sch.column}).to_csv(),
            "key,population,schools\nBoston,675647,125\nLowell,106519,\nSpringfield,,60\n\"Worcester, MA\",206518,\n");
  CsvColumn enr = load_csv_column(m, fixture("school-enrollment.csv"), "school", "enrollment", "School");
  EXPECT_EQ(code_of([&] { join_columns({&pop.column, &enr.column}); }), Errc::kKeyTypeMismatch);
}
