#include <gtest/gtest.h>

#include "clustergibbs/schedule.hpp"

using namespace clustergibbs;
using nlohmann::json;

TEST(Schedule, StaticSteps) {
    const auto s = parse_schedule(json::parse(R"({"static": [{"qubit": 1, "basis": "X"}, {"qubit": 0, "basis": [0, 0.6, 0.8]}]})"));
    std::vector<char> measured(2, 0);
    const Step first = s.next("", measured);
    EXPECT_EQ(first.qubit, 1);
    EXPECT_EQ(first.basis, "X");
    measured[1] = 1;
    const Step second = s.next("1", measured);
    EXPECT_EQ(second.qubit, 0);
    EXPECT_DOUBLE_EQ(second.axis[2], 0.8);
    measured[0] = 1;
    EXPECT_THROW(s.next("10", measured), ScheduleError);
}

TEST(Schedule, Validation) {
    EXPECT_THROW(parse_schedule(json::parse(R"({"static": [{"qubit": 0, "basis": "Q"}]})")), ScheduleError);
    EXPECT_THROW(parse_schedule(json::parse(R"({"static": [{"qubit": 0, "basis": [1, 1, 0]}]})")), ScheduleError);
    EXPECT_THROW(parse_schedule(json::parse(R"({"static": [{"qubit": 0, "basis": "Z"}, {"qubit": 0, "basis": "X"}]})")),
                 ScheduleError);
    EXPECT_THROW(parse_schedule(json::parse(R"({"static": [], "adaptive": {}})")), ScheduleError);
    EXPECT_THROW(parse_schedule(json::parse(R"({"adaptive": {"rules": {"2": {"qubit": 0, "basis": "Z"}}}})")),
                 ScheduleError);
    EXPECT_THROW(parse_schedule(json::parse(R"({"static": [{"qubit": 0, "basis": "Z", "extra": 1}]})")), ScheduleError);
}

TEST(Schedule, AdaptiveRulesAndDefault) {
    const auto s = parse_schedule(json::parse(R"({"adaptive": {
        "rules": {"": {"qubit": 2, "basis": "Z"}, "1": {"qubit": 0, "basis": "Y"}},
        "default": {"basis": "X", "order": [1, 0, 2]}}})"));
    std::vector<char> measured{0, 0, 1};
    EXPECT_EQ(s.next("1", measured).qubit, 0);
    const Step d = s.next("0", measured);
    EXPECT_EQ(d.qubit, 1);
    EXPECT_EQ(d.basis, "X");
    measured[1] = 1;
    EXPECT_EQ(s.next("01", measured).qubit, 0);
}

TEST(Schedule, AdaptiveErrors) {
    const auto s = Schedule::adaptive({{"", named_step(0, 'Z')}, {"0", named_step(0, 'X')}}, std::nullopt);
    std::vector<char> measured{1, 0};
    EXPECT_THROW(s.next("0", measured), ScheduleError); // re-measures qubit 0
    EXPECT_THROW(s.next("1", measured), ScheduleError); // no rule
    const auto far = Schedule::adaptive({{"", named_step(5, 'Z')}}, std::nullopt);
    EXPECT_THROW(far.next("", std::vector<char>(2, 0)), ScheduleError);
}

TEST(Schedule, ZBasis) {
    const auto s = Schedule::z_basis(3);
    ASSERT_TRUE(s.is_static());
    ASSERT_EQ(s.static_steps().size(), 3u);
    for (int q = 0; q < 3; ++q) EXPECT_EQ(s.static_steps()[q], named_step(q, 'Z'));
}
