#include "hyso3/config.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace hyso3 {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Config, NumberExpressions) {
  EXPECT_DOUBLE_EQ(parse_number("1.5"), 1.5);
  EXPECT_DOUBLE_EQ(parse_number("-2.5e-3"), -2.5e-3);
  EXPECT_DOUBLE_EQ(parse_number("0.9*pi"), 0.9 * kPi);
  EXPECT_DOUBLE_EQ(parse_number("pi - 1e-9"), kPi - 1e-9);
  EXPECT_DOUBLE_EQ(parse_number("7/pi^2"), 7 / (kPi * kPi));
  EXPECT_DOUBLE_EQ(parse_number("(1 + 2) * 3"), 9.0);
  EXPECT_DOUBLE_EQ(parse_number("-pi/2"), -kPi / 2);
  EXPECT_DOUBLE_EQ(parse_number(" 2 "), 2.0);
}

TEST(Config, NumberRejectsGarbage) {
  for (const char* bad : {"", "abc", "1 +", "(1", "1)", "2 3", "pi pi", "1e", "nan"}) {
    EXPECT_THROW(parse_number(bad), ConfigError) << bad;
  }
}

TEST(Config, Lists) {
  const std::vector<double> v = parse_list("[1, pi, 2*3]");
  ASSERT_EQ(v.size(), 3u);
  EXPECT_DOUBLE_EQ(v[1], kPi);
  EXPECT_DOUBLE_EQ(v[2], 6.0);
  EXPECT_TRUE(parse_list("[]").empty());
  EXPECT_THROW(parse_list("1, 2"), ConfigError);
  EXPECT_THROW(parse_list("[1, , 2]"), ConfigError);
}

TEST(Config, KeyValueParsing) {
  const std::string text =
      "# comment\n"
      "a = 0.5*pi   # trailing\n"
      "\n"
      "flag = true\n"
      "name = fig3\n"
      "names = [x, y]\n"
      "n = 42\n"
      "v = [1, 2, 3]\n";
  const KeyValueConfig kv = KeyValueConfig::parse(text, "test");
  EXPECT_DOUBLE_EQ(kv.get_double("a"), kPi / 2);
  EXPECT_TRUE(kv.get_bool("flag"));
  EXPECT_EQ(kv.get_string("name"), "fig3");
  EXPECT_EQ(kv.get_name_list("names"), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(kv.get_int("n"), 42);
  EXPECT_EQ(kv.unused_keys(), std::vector<std::string>{"v"});
  EXPECT_EQ(kv.get_list("v").size(), 3u);
  EXPECT_TRUE(kv.unused_keys().empty());
  EXPECT_THROW(kv.get_double("missing"), ConfigError);
  EXPECT_THROW(kv.get_int("a"), ConfigError);
  EXPECT_THROW(kv.get_bool("name"), ConfigError);
}

TEST(Config, RejectsDuplicatesAndMalformedLines) {
  EXPECT_THROW(KeyValueConfig::parse("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(KeyValueConfig::parse("just words\n"), ConfigError);
  EXPECT_THROW(KeyValueConfig::parse(" = 3\n"), ConfigError);
  try {
    KeyValueConfig::parse("a = 1\na = 2\n", "dup.cfg");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "dup.cfg:2");
    EXPECT_NE(std::string(e.what()).find("'a'"), std::string::npos);
  }
}

}  // namespace
}  // namespace hyso3
