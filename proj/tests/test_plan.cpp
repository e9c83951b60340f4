#include "dtipa/plan.hpp"

#include <doctest.h>

#include <cmath>

using namespace dtipa;

namespace {

// The published worked scenario: three Q1 attributes with feasibilities
// (0.74, 0.19, 0.06) and the dominant rule
// (ticketing > 4.5 and safety > 4.5 and crowding > 3.5) implies overall 5.
struct Scenario {
    IpaResult ipa;
    FeasibilityVector feasibility;
    ClassificationRule rule;
    std::vector<double> means; // indexed by attribute column
};

Scenario make_scenario() {
    Scenario s;
    const auto entry = [](std::size_t attr, const char* name, double mean, double weight,
                          Quadrant q) {
        IpaEntry e;
        e.attribute = attr;
        e.name = name;
        e.mean = mean;
        e.weight = weight;
        e.quadrant = q;
        e.initial_priority = static_cast<int>(q);
        return e;
    };
    // Columns: 0 ticketing, 1 station_crowding, 2 car_crowding, 3 safety.
    s.ipa.entries = {entry(0, "ticketing", 4.21, 0.22, Quadrant::priority_improve),
                     entry(1, "station_crowding", 4.0, 0.08, Quadrant::priority_improve),
                     entry(2, "car_crowding", 3.56, 0.05, Quadrant::priority_improve),
                     entry(3, "safety", 4.50, 0.045, Quadrant::keep_up)};
    s.ipa.grand_mean = 4.37;
    s.ipa.mean_weight = 0.03;

    s.feasibility.labels = {"ticketing", "station_crowding", "car_crowding"};
    s.feasibility.values = {0.74, 0.19, 0.06};
    s.feasibility.lambda_max = 3.0;

    s.rule = make_rule_from_counts(
        6,
        {{0, Relation::greater, 4.5}, {3, Relation::greater, 4.5}, {2, Relation::greater, 3.5}},
        5, 33, 35, 107);

    s.means = {4.21, 4.0, 3.56, 4.50};
    return s;
}

} // namespace

TEST_SUITE("plan") {

TEST_CASE("infeasible_attributes flags feasibility below tau") {
    const auto s = make_scenario();
    const auto infeasible = infeasible_attributes(s.ipa, s.feasibility, 0.1);
    CHECK(infeasible == std::vector<std::size_t>{2});

    // Everything feasible.
    FeasibilityVector generous = s.feasibility;
    generous.values = {0.5, 0.3, 0.2};
    CHECK(infeasible_attributes(s.ipa, generous, 0.1).empty());

    // tau = 0 never flags (strict less-than).
    CHECK(infeasible_attributes(s.ipa, s.feasibility, 1e-300).empty());
}

TEST_CASE("infeasible_attributes requires every Q1 attribute to be elicited") {
    auto s = make_scenario();
    s.feasibility.labels = {"ticketing", "car_crowding"};
    s.feasibility.values = {0.9, 0.1};
    CHECK_THROWS_WITH_AS(infeasible_attributes(s.ipa, s.feasibility, 0.1),
                         doctest::Contains("feasibility not elicited"), std::runtime_error);
}

TEST_CASE("find_adjustment_rule selects the paper-style rule") {
    const auto s = make_scenario();
    std::vector<ClassificationRule> rules{s.rule};
    // A weaker competing rule that also contains the infeasible attribute.
    rules.push_back(make_rule_from_counts(
        9, {{2, Relation::greater, 3.5}, {1, Relation::greater, 4.5}}, 5, 3, 4, 107));
    const auto chosen = find_adjustment_rule(rules, 2, s.means, 5);
    REQUIRE(chosen.has_value());
    CHECK(chosen->rule_id == 6); // P = 0.943 beats 0.750
}

TEST_CASE("find_adjustment_rule requires the attribute, the target and headroom") {
    const auto s = make_scenario();

    // Does not contain the infeasible attribute.
    const auto no_attr = make_rule_from_counts(
        1, {{0, Relation::greater, 4.5}, {3, Relation::greater, 4.5}}, 5, 30, 32, 107);
    CHECK(!find_adjustment_rule({no_attr}, 2, s.means, 5).has_value());

    // Concludes the wrong class.
    auto wrong_class = s.rule;
    wrong_class.conclusion = 4;
    CHECK(!find_adjustment_rule({wrong_class}, 2, s.means, 5).has_value());

    // No other condition exceeds its attribute's mean: nothing to improve.
    const auto no_headroom = make_rule_from_counts(
        2, {{2, Relation::greater, 3.5}, {1, Relation::greater, 3.5}}, 5, 30, 32, 107);
    CHECK(!find_adjustment_rule({no_headroom}, 2, s.means, 5).has_value());
}

TEST_CASE("find_adjustment_rule breaks probability ties by support then id") {
    const auto s = make_scenario();
    const auto a = make_rule_from_counts(
        4, {{2, Relation::greater, 3.5}, {0, Relation::greater, 4.5}}, 5, 30, 40, 107);
    const auto b = make_rule_from_counts(
        3, {{2, Relation::greater, 3.5}, {1, Relation::greater, 4.5}}, 5, 15, 20, 107);
    // Equal P = 0.75; a has larger S.
    auto chosen = find_adjustment_rule({a, b}, 2, s.means, 5);
    REQUIRE(chosen.has_value());
    CHECK(chosen->rule_id == 4);

    const auto c = make_rule_from_counts(
        2, {{2, Relation::greater, 3.5}, {1, Relation::greater, 4.5}}, 5, 30, 40, 107);
    // Equal P and S: lower id wins.
    chosen = find_adjustment_rule({a, c}, 2, s.means, 5);
    REQUIRE(chosen.has_value());
    CHECK(chosen->rule_id == 2);
}

TEST_CASE("adjust_priorities reproduces the worked example") {
    const auto s = make_scenario();
    const auto plan = adjust_priorities(s.ipa, s.feasibility, s.rule, s.means, {0.1, 0.01, 5});

    const auto* ticketing = plan.find(0);
    REQUIRE(ticketing);
    CHECK(ticketing->final_priority == 1);
    REQUIRE(ticketing->magnitude.has_value());
    CHECK(*ticketing->magnitude == doctest::Approx(0.29).epsilon(1e-9));
    CHECK_FALSE(ticketing->reduce);

    const auto* safety = plan.find(3);
    REQUIRE(safety);
    CHECK(safety->initial_priority == 2);
    CHECK(safety->final_priority == 1);
    REQUIRE(safety->magnitude.has_value());
    CHECK(*safety->magnitude == doctest::Approx(0.01).epsilon(1e-9));

    const auto* crowding = plan.find(2);
    REQUIRE(crowding);
    CHECK(crowding->final_priority == 4);
    CHECK(!crowding->magnitude.has_value());

    // Untouched attribute keeps its IPA priority.
    const auto* station = plan.find(1);
    REQUIRE(station);
    CHECK(station->final_priority == 1);
    CHECK(!station->magnitude.has_value());

    CHECK(plan.selected_rule_id.value() == 6);
    CHECK(plan.target_class.value() == 5);
    CHECK(plan.probability.value() == doctest::Approx(33.0 / 35.0).epsilon(1e-12));
}

TEST_CASE("magnitude boundary arithmetic") {
    auto s = make_scenario();

    // mean 4.49 against "> 4.5": the gap is 0.01 exactly.
    s.means[0] = 4.49;
    auto plan = adjust_priorities(s.ipa, s.feasibility, s.rule, s.means, {0.1, 0.01, 5});
    CHECK(*plan.find(0)->magnitude == doctest::Approx(0.01).epsilon(1e-9));

    // mean exactly at the threshold: strict > is unmet, magnitude is one step.
    s.means[0] = 4.5;
    plan = adjust_priorities(s.ipa, s.feasibility, s.rule, s.means, {0.1, 0.01, 5});
    CHECK(*plan.find(0)->magnitude == doctest::Approx(0.01).epsilon(1e-9));

    // Sub-step gap rounds up to one step.
    s.means[0] = 4.495327;
    plan = adjust_priorities(s.ipa, s.feasibility, s.rule, s.means, {0.1, 0.01, 5});
    CHECK(*plan.find(0)->magnitude == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("a lowered target is expressed as a reduction") {
    auto s = make_scenario();
    // Rule wants crowding-like attribute 1 to sit at or below 3.5.
    const auto rule = make_rule_from_counts(
        8, {{2, Relation::greater, 3.5}, {1, Relation::less_equal, 3.5}}, 5, 30, 32, 107);
    s.means[1] = 3.7;
    const auto plan = adjust_priorities(s.ipa, s.feasibility, rule, s.means, {0.1, 0.01, 5});
    const auto* station = plan.find(1);
    REQUIRE(station);
    CHECK(station->final_priority == 1);
    REQUIRE(station->magnitude.has_value());
    CHECK(station->reduce);
    // mean - threshold + granularity = 0.2 + 0.01.
    CHECK(*station->magnitude == doctest::Approx(0.21).epsilon(1e-9));
}

TEST_CASE("rule with every condition already satisfied only demotes") {
    auto s = make_scenario();
    s.means = {4.6, 4.0, 3.56, 4.6}; // ticketing and safety already above 4.5
    const auto plan = adjust_priorities(s.ipa, s.feasibility, s.rule, s.means, {0.1, 0.01, 5});
    CHECK(plan.find(0)->final_priority == 1); // keeps its IPA priority
    CHECK(!plan.find(0)->magnitude.has_value());
    CHECK(plan.find(3)->final_priority == 2);
    CHECK(plan.find(2)->final_priority == 4);
}

TEST_CASE("adjust_priorities rejects a rule that cannot neutralize the infeasible attribute") {
    auto s = make_scenario();
    s.means[2] = 3.2; // crowding mean fails its own "> 3.5" condition
    CHECK_THROWS_WITH_AS(adjust_priorities(s.ipa, s.feasibility, s.rule, s.means, {0.1, 0.01, 5}),
                         doctest::Contains("cannot neutralize"), std::runtime_error);
}

TEST_CASE("build_plan with empty infeasible set keeps IPA priorities") {
    const auto s = make_scenario();
    FeasibilityVector generous = s.feasibility;
    generous.values = {0.5, 0.3, 0.2};
    const auto plan = build_plan(s.ipa, generous, {s.rule}, s.means, {0.1, 0.01, 5});
    for (const auto& e : plan.entries) {
        CHECK(e.final_priority == e.initial_priority);
        CHECK(!e.magnitude.has_value());
    }
    CHECK(!plan.selected_rule_id.has_value());
    REQUIRE(plan.warnings.size() == 1);
    CHECK(plan.warnings[0].find("IPA priorities unchanged") != std::string::npos);
}

TEST_CASE("build_plan warns when no rule qualifies") {
    const auto s = make_scenario();
    const auto no_attr = make_rule_from_counts(
        1, {{0, Relation::greater, 4.5}, {3, Relation::greater, 4.5}}, 5, 30, 32, 107);
    const auto plan = build_plan(s.ipa, s.feasibility, {no_attr}, s.means, {0.1, 0.01, 5});
    CHECK(plan.find(2)->final_priority == 1); // untouched Q1 priority
    REQUIRE(plan.warnings.size() == 1);
    CHECK(plan.warnings[0].find("no qualifying rule") != std::string::npos);
}

TEST_CASE("build_plan handles the single-attribute paper case end to end") {
    const auto s = make_scenario();
    const auto plan = build_plan(s.ipa, s.feasibility, {s.rule}, s.means, {0.1, 0.01, std::nullopt});
    CHECK(plan.selected_rule_id.value() == 6);
    CHECK(plan.target_class.value() == 5); // defaulted from the rule conclusions
    CHECK(plan.find(2)->final_priority == 4);
    CHECK(*plan.find(0)->magnitude == doctest::Approx(0.29).epsilon(1e-9));
    CHECK(*plan.find(3)->magnitude == doctest::Approx(0.01).epsilon(1e-9));
    REQUIRE(plan.applications.size() == 1);
    CHECK(plan.applications[0].infeasible_attribute == 2);
}

TEST_CASE("build_plan processes multiple infeasible attributes in weight order") {
    Scenario s = make_scenario();
    // Attribute 1 becomes infeasible too; its weight (0.08) exceeds
    // attribute 2's (0.05), so it is handled first.
    s.feasibility.values = {0.74, 0.05, 0.06};

    // Rule for attribute 1: demotes it and promotes attribute 0.
    const auto rule_one = make_rule_from_counts(
        5, {{1, Relation::greater, 3.5}, {0, Relation::greater, 4.5}}, 5, 30, 32, 107);
    // Rule for attribute 2: demotes it, re-promotes 0 and promotes 3.
    const auto rule_two = make_rule_from_counts(
        6, {{2, Relation::greater, 3.5}, {0, Relation::greater, 4.5}, {3, Relation::greater, 4.5}},
        5, 33, 35, 107);
    const auto plan =
        build_plan(s.ipa, s.feasibility, {rule_one, rule_two}, s.means, {0.1, 0.01, 5});

    CHECK(plan.find(1)->final_priority == 4);
    CHECK(plan.find(2)->final_priority == 4);
    CHECK(plan.find(0)->final_priority == 1);
    CHECK(*plan.find(0)->magnitude == doctest::Approx(0.29).epsilon(1e-9));
    CHECK(plan.find(3)->final_priority == 1);
    CHECK(*plan.find(3)->magnitude == doctest::Approx(0.01).epsilon(1e-9));
    REQUIRE(plan.applications.size() == 2);
    CHECK(plan.applications[0].infeasible_attribute == 1);
    CHECK(plan.applications[0].rule_id == 5);
    CHECK(plan.applications[1].infeasible_attribute == 2);
    CHECK(plan.applications[1].rule_id == 6);
    // The primary selected rule is the first application's.
    CHECK(plan.selected_rule_id.value() == 5);
}

TEST_CASE("closure: applying the magnitudes satisfies the selected rule") {
    const auto s = make_scenario();
    const auto plan = adjust_priorities(s.ipa, s.feasibility, s.rule, s.means, {0.1, 0.01, 5});
    auto adjusted = s.means;
    for (const auto& e : plan.entries) {
        if (!e.magnitude) continue;
        adjusted[e.attribute] += e.reduce ? -*e.magnitude : *e.magnitude;
    }
    for (const auto& c : s.rule.conditions) {
        const double v = adjusted[c.attribute];
        // Reaching the threshold counts as meeting the improvement target.
        if (c.relation == Relation::greater) {
            CHECK(v >= c.threshold - 1e-9);
        } else {
            CHECK(v <= c.threshold + 1e-9);
        }
    }
}

TEST_CASE("no feasible attribute is demoted and no infeasible attribute gets a magnitude") {
    const auto s = make_scenario();
    const auto plan = adjust_priorities(s.ipa, s.feasibility, s.rule, s.means, {0.1, 0.01, 5});
    const auto infeasible = infeasible_attributes(s.ipa, s.feasibility, 0.1);
    for (const auto& e : plan.entries) {
        const bool is_infeasible =
            std::find(infeasible.begin(), infeasible.end(), e.attribute) != infeasible.end();
        if (is_infeasible) {
            CHECK(!e.magnitude.has_value());
        } else {
            CHECK(e.final_priority <= e.initial_priority); // never demoted
        }
        if (e.magnitude) {
            CHECK(e.final_priority == 1);
            CHECK(*e.magnitude > 0.0);
        }
    }
}

} // TEST_SUITE
