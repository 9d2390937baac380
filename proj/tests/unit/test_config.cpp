#include <gtest/gtest.h>

#include "sfqgate/config.hpp"
#include "sfqgate/error.hpp"

namespace sfq {
namespace {

std::string parse_message(std::string_view text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.error_class(), ErrorClass::Parse);
    return e.what();
  }
  ADD_FAILURE() << "expected a parse error";
  return {};
}

TEST(Config, EmptyTextGivesDefaults) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.basis.levels, 5);
  EXPECT_EQ(c.basis.n_max, 50);
  EXPECT_DOUBLE_EQ(c.schedule.clock_freq, 20.0);
  EXPECT_DOUBLE_EQ(c.schedule.kick_angle, kPi / 100.0);
  EXPECT_DOUBLE_EQ(c.penalty.gamma, 1e-5);
  EXPECT_EQ(c.penalty.stages, 150);
  EXPECT_EQ(c.penalty.updates_per_stage, 20);
  EXPECT_EQ(c.target, "cz");
  EXPECT_DOUBLE_EQ(c.circuit.c1, 70.0);
  EXPECT_DOUBLE_EQ(c.fsim.hold, 17.0);
}

TEST(Config, ParsesSectionsAndExpressions) {
  const RunConfig c = parse_config(R"(
# comment
[schedule]
clock_freq = 40
kick_angle = pi/200   # trailing comment
duration = 70
excursions = 2

[optimizer]
target = "cnot"
z_compensate = false
seed = 12

[circuit]
iq1_right = 22.5
phic_on = 0.38

[decompose]
layer_durations = [20, 25, 2*pi]

[search]
clock_freqs = [20, 40]
kick_angles = [pi/100, pi/200]
)");
  EXPECT_DOUBLE_EQ(c.schedule.clock_freq, 40.0);
  EXPECT_DOUBLE_EQ(c.schedule.kick_angle, kPi / 200.0);
  EXPECT_EQ(c.schedule.excursion_count, 2);
  EXPECT_EQ(c.target, "cnot");
  EXPECT_FALSE(c.optimizer.relaxation.z_compensate);
  EXPECT_EQ(c.seed, 12u);
  EXPECT_DOUBLE_EQ(c.circuit.junctions[0].right_nA, 22.5);
  EXPECT_DOUBLE_EQ(c.circuit.phi_on[1], 0.38);
  EXPECT_DOUBLE_EQ(c.decompose.layer_durations[2], 2 * kPi);
  ASSERT_EQ(c.search.clocks.size(), 2u);
  EXPECT_DOUBLE_EQ(c.search.clocks[1].second, kPi / 200.0);
}

TEST(Config, NumberExpressions) {
  EXPECT_DOUBLE_EQ(parse_number_expression("pi/200"), kPi / 200.0);
  EXPECT_DOUBLE_EQ(parse_number_expression("2*pi"), 2.0 * kPi);
  EXPECT_DOUBLE_EQ(parse_number_expression("-pi/4"), -kPi / 4.0);
  EXPECT_DOUBLE_EQ(parse_number_expression("1e-5"), 1e-5);
  EXPECT_THROW(parse_number_expression("pie"), std::exception);
  EXPECT_THROW(parse_number_expression("1/0"), std::exception);
}

TEST(Config, InvalidValueNamesTheKeyAndLine) {
  const std::string m = parse_message("[basis]\n\nlevels = 0\n");
  EXPECT_NE(m.find("basis.levels"), std::string::npos) << m;
  EXPECT_NE(m.find("line 3"), std::string::npos) << m;
}

TEST(Config, RejectsUnknownKeysAndSections) {
  const std::string k = parse_message("[schedule]\nclock = 20\n");
  EXPECT_NE(k.find("line 2"), std::string::npos);
  EXPECT_NE(k.find("schedule.clock"), std::string::npos);
  EXPECT_NE(parse_message("[nope]\n").find("unknown section"), std::string::npos);
  EXPECT_NE(parse_message("[basis]\nlevels = 5\nlevels = 6\n").find("duplicate"), std::string::npos);
  EXPECT_NE(parse_message("levels = 5\n").find("outside"), std::string::npos);
  EXPECT_NE(parse_message("[basis]\nlevels = 4.5\n").find("integer"), std::string::npos);
  EXPECT_NE(parse_message("[optimizer]\nz_compensate = yes\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_message("[schedule\n").find("line 1"), std::string::npos);
}

TEST(Config, RangeChecks) {
  parse_message("[basis]\nn_max = 10\n");
  parse_message("[decompose]\ntarget = \"swap\"\n");
  parse_message("[search]\nbudget = 0\n");
  EXPECT_NO_THROW(parse_config("[basis]\nlevels = 12\nn_max = 20\n"));
}

TEST(Config, LoadMissingFileIsAnIoError) {
  try {
    load_config("/nonexistent/sfq.toml");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.error_class(), ErrorClass::Io);
  }
}

}  // namespace
}  // namespace sfq
