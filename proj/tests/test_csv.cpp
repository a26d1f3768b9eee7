#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "nlzcav/atomstruct.hpp"
#include "nlzcav/csv.hpp"

using namespace nlzcav;

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-2.5), "-2.5");
  EXPECT_EQ(format_number(1e-9), "1e-09");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
}

TEST(Csv, WriteReadRoundTrip) {
  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{1.0, 0.1 + 0.2}, {-3e-12, 7.0}};
  std::stringstream s;
  write_csv(t, s);
  EXPECT_EQ(s.str().substr(0, 4), "a,b\n");
  const CsvTable back = read_csv(s);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(back.column("b"), 1u);
  EXPECT_THROW(back.column("c"), LookupError);
}

TEST(Csv, FileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "nlzcav_csv_test.csv").string();
  CsvTable t;
  t.header = {"x"};
  t.rows = {{42.0}};
  write_csv(t, path);
  EXPECT_EQ(read_csv_file(path).rows, t.rows);
  std::filesystem::remove(path);
  EXPECT_THROW(read_csv_file(path), ConfigError);
}

TEST(Csv, MalformedInput) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_csv(in);
  };
  EXPECT_THROW(parse(""), ConfigError);
  EXPECT_THROW(parse("a,b\n1\n"), ConfigError);
  EXPECT_THROW(parse("a,b\n1,x\n"), ConfigError);
  EXPECT_THROW(parse("a\n1,2\n"), ConfigError);
  EXPECT_EQ(parse("a,b\r\n1,2\r\n").rows.at(0).at(1), 2.0);
}
