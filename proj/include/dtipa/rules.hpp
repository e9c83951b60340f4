#pragma once

#include "dtipa/cart.hpp"
#include "dtipa/survey.hpp"

#include <span>
#include <string>
#include <vector>

namespace dtipa {

enum class Relation {
    less_equal,
    greater,
};

struct RuleCondition {
    std::size_t attribute = 0;
    Relation relation = Relation::less_equal;
    double threshold = 0.0;
    bool operator==(const RuleCondition&) const = default;
};

struct RuleThresholds {
    double min_support = 0.006;
    double min_population = 0.01;
    double min_probability = 0.6;
};

// One root-to-leaf path: IF the conditions hold THEN the overall score is the
// leaf majority class. S = matched/total, Po = condition/total,
// P = matched/condition, so P * Po = S.
struct ClassificationRule {
    int rule_id = 0; // the leaf's node id
    std::vector<RuleCondition> conditions;
    int conclusion = 0;
    std::size_t matched_count = 0;
    std::size_t condition_count = 0;
    std::size_t total_count = 0;
    double support = 0.0;
    double population = 0.0;
    double probability = 0.0;
    bool valid = false;
};

bool condition_met(double value, const RuleCondition& c);
bool satisfies(std::span<const int> row, const std::vector<RuleCondition>& conditions);

// Collapses repeated conditions on one attribute to the tightest interval:
// the largest lower (>) bound and the smallest upper (<=) bound survive, at
// the attribute's first position in root-to-leaf order.
std::vector<RuleCondition> merge_conditions(const std::vector<RuleCondition>& path);

// Fills in S/Po/P and the validity flag from raw counts.
ClassificationRule make_rule_from_counts(int rule_id, std::vector<RuleCondition> conditions,
                                         int conclusion, std::size_t matched_count,
                                         std::size_t condition_count, std::size_t total_count,
                                         const RuleThresholds& thresholds = {});

// One rule per leaf, counted by scanning every survey row against the merged
// conditions.
std::vector<ClassificationRule> extract_rules(const DecisionTree& t, const SurveyMatrix& m,
                                              const RuleThresholds& thresholds = {});

// Re-evaluates validity under the given thresholds and keeps passing rules,
// order preserved.
std::vector<ClassificationRule> filter_valid(const std::vector<ClassificationRule>& rules,
                                             const RuleThresholds& thresholds = {});

std::string format_conditions(const std::vector<RuleCondition>& conditions,
                              const std::vector<std::string>& attribute_names);

} // namespace dtipa
