#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "test_util.hpp"
#include "tripboost/civil_time.hpp"
#include "tripboost/csv.hpp"
#include "tripboost/errors.hpp"
#include "tripboost/kv_config.hpp"
#include "tripboost/rng.hpp"

using namespace tripboost;
using namespace std::chrono;

TEST(CivilTime, ParsesAndFormatsRoundTrip) {
  const auto t = parse_timestamp("2019-03-04T08:30:15");
  ASSERT_TRUE(t);
  EXPECT_EQ(format_timestamp(*t), "2019-03-04T08:30:15");
  EXPECT_EQ(format_date(day_of(*t)), "2019-03-04");
}

TEST(CivilTime, RejectsMalformedText) {
  for (const char* bad : {"not-a-date", "2019-03-04 08:30:15", "2019-13-01T00:00:00",
                          "2019-02-30T00:00:00", "2019-03-04T24:00:00", "2019-03-04T08:30",
                          "2019-03-04T08:30:15Z", ""}) {
    EXPECT_FALSE(parse_timestamp(bad)) << bad;
  }
}

TEST(CivilTime, FieldsOfKnownDates) {
  const auto f = civil_fields(testutil::ts("2019-03-04T08:30:00"));
  EXPECT_EQ(f.year, 2019);
  EXPECT_EQ(f.month, 3u);
  EXPECT_EQ(f.day, 4u);
  EXPECT_EQ(f.iso_week, 10u);
  EXPECT_EQ(f.day_of_week, 0u);
  EXPECT_EQ(f.hour, 8);
  EXPECT_EQ(f.minute, 30);
}

TEST(CivilTime, IsoWeekEdgeCases) {
  // 2020-01-01 is a Wednesday in ISO week 1; 2021-01-03 is a Sunday in week 53 of 2020.
  EXPECT_EQ(iso_week_number(sys_days{year{2020} / 1 / 1}), 1u);
  EXPECT_EQ(iso_week_number(sys_days{year{2021} / 1 / 3}), 53u);
  EXPECT_EQ(iso_week_number(sys_days{year{2019} / 12 / 30}), 1u);
  EXPECT_EQ(day_of_week(sys_days{year{2019} / 3 / 9}), 5u);   // Saturday
  EXPECT_EQ(day_of_week(sys_days{year{2019} / 3 / 10}), 6u);  // Sunday
}

TEST(CivilTime, MonthArithmetic) {
  const sys_days mid{year{2019} / 9 / 17};
  EXPECT_EQ(month_start(mid), sys_days{year{2019} / 9 / 1});
  EXPECT_EQ(add_months(sys_days{year{2019} / 11 / 1}, 3), sys_days{year{2020} / 2 / 1});
  EXPECT_EQ(add_months(sys_days{year{2019} / 3 / 1}, -3), sys_days{year{2018} / 12 / 1});
}

TEST(Csv, QuotedFieldsAndEmbeddedNewlines) {
  std::istringstream in("a,b,c\n\"x, y\",\"say \"\"hi\"\"\",\"two\nlines\"\r\nlast,,\n");
  CsvReader reader(in);
  std::vector<std::string> f;
  ASSERT_TRUE(reader.next(f));
  EXPECT_EQ(f, (std::vector<std::string>{"a", "b", "c"}));
  ASSERT_TRUE(reader.next(f));
  EXPECT_EQ(reader.line_number(), 2u);
  EXPECT_EQ(f, (std::vector<std::string>{"x, y", "say \"hi\"", "two\nlines"}));
  ASSERT_TRUE(reader.next(f));
  EXPECT_EQ(reader.line_number(), 4u);
  EXPECT_EQ(f, (std::vector<std::string>{"last", "", ""}));
  EXPECT_FALSE(reader.next(f));
}

TEST(Csv, EscapeRoundTrips) {
  const std::vector<std::string> fields = {"plain", "a,b", "q\"q", "multi\nline", ""};
  std::ostringstream out;
  write_csv_row(out, fields);
  std::istringstream in(out.str());
  CsvReader reader(in);
  std::vector<std::string> back;
  ASSERT_TRUE(reader.next(back));
  EXPECT_EQ(back, fields);
  EXPECT_EQ(csv_escape("plain"), "plain");
}

TEST(Csv, FormatDoubleRoundTrips) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd(0, 1e4);
  for (int i = 0; i < 1000; ++i) {
    const double v = nd(gen);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Csv, AtomicWriteLeavesNothingOnFailure) {
  const auto dir = std::filesystem::temp_directory_path() / "tripboost_atomic_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  std::filesystem::remove(path);
  EXPECT_THROW(write_file_atomic(path,
                                 [](std::ostream& out) {
                                   out << "partial";
                                   throw DataError("boom");
                                 }),
               DataError);
  EXPECT_FALSE(std::filesystem::exists(path));
  EXPECT_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
  write_file_atomic(path, [](std::ostream& out) { out << "whole"; });
  std::ifstream in(path);
  std::string s;
  in >> s;
  EXPECT_EQ(s, "whole");
  std::filesystem::remove_all(dir);
}

TEST(KeyValueConfig, ParsesCommentsAndOverrides) {
  std::istringstream in("# header\n a = 1 \nb=two words # trailing\n\na = 3\n");
  const auto kv = KeyValueConfig::parse(in);
  EXPECT_EQ(kv.get_int("a"), 3);
  EXPECT_EQ(kv.get("b"), "two words");
  EXPECT_FALSE(kv.get("missing"));
}

TEST(KeyValueConfig, MalformedLinesAndValuesThrow) {
  std::istringstream bad_line("just a line\n");
  EXPECT_THROW(KeyValueConfig::parse(bad_line), ConfigError);
  std::istringstream bad_value("x = 1.5abc\n");
  const auto kv = KeyValueConfig::parse(bad_value);
  EXPECT_THROW(kv.get_double("x"), ConfigError);
  EXPECT_THROW(kv.get_int("x"), ConfigError);
  EXPECT_THROW(KeyValueConfig::load("/nonexistent/tripboost.conf"), ConfigError);
}

TEST(Rng, EngineMatchesStandardSequence) {
  // mt19937_64's 10000th output is fixed by the standard.
  std::mt19937_64 ref;
  ref.discard(9999);
  Rng rng(5489u);
  for (int i = 0; i < 9999; ++i) rng.next_u64();
  EXPECT_EQ(rng.next_u64(), 9981545732273789042ull);
  EXPECT_EQ(ref(), 9981545732273789042ull);
}

TEST(Rng, SubstreamsAreDeterministicAndDistinct) {
  auto a = Rng::substream(42, {1, 7});
  auto b = Rng::substream(42, {1, 7});
  auto c = Rng::substream(42, {7, 1});
  const auto x = a.next_u64();
  EXPECT_EQ(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
  EXPECT_NE(derive_seed(42, {1}), derive_seed(43, {1}));
}

TEST(Rng, UniformMoments) {
  Rng rng(1);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 0.005);
  EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12.0, 0.002);
}

TEST(Rng, NormalMoments) {
  Rng rng(2);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal(3.0, 2.0);
    s += z;
    s2 += z * z;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 3.0, 0.03);
  EXPECT_NEAR(std::sqrt(s2 / n - mean * mean), 2.0, 0.03);
}

TEST(Rng, UniformIndexCoversRangeEvenly) {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_index(7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(Rng, SampleWithoutReplacementIsSortedAndDistinct) {
  Rng rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = rng.sample_without_replacement(20, 7);
    ASSERT_EQ(s.size(), 7u);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 7u);
    EXPECT_LT(s.back(), 20u);
  }
  EXPECT_EQ(rng.sample_without_replacement(5, 5), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}
