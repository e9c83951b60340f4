#pragma once

#include "dtipa/ahp.hpp"
#include "dtipa/analysis.hpp"
#include "dtipa/rules.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dtipa {

struct PlanConfig {
    double tau = 0.1;          // feasibility below this marks a Q1 attribute infeasible
    double granularity = 0.01; // improvement magnitudes round up to this step
    std::optional<int> target_class; // default: highest conclusion among the valid rules
};

struct PlanEntry {
    std::size_t attribute = 0;
    std::string name;
    int initial_priority = 0;
    int final_priority = 0;
    std::optional<double> magnitude; // mean-score change needed, > 0 when present
    bool reduce = false;             // magnitude direction: true = lower the mean
    std::string rationale;
};

struct RuleApplication {
    std::size_t infeasible_attribute = 0;
    int rule_id = 0;
    int target_class = 0;
    double probability = 0.0;
};

struct ImprovementPlan {
    std::vector<PlanEntry> entries; // non-overall attributes in column order
    std::vector<RuleApplication> applications;
    std::optional<int> selected_rule_id;
    std::optional<int> target_class;
    std::optional<double> probability;
    std::vector<std::string> warnings;

    PlanEntry* find(std::size_t attribute);
    const PlanEntry* find(std::size_t attribute) const;
};

// Q1 attributes whose feasibility falls below tau. Throws when a Q1 attribute
// was not elicited.
std::vector<std::size_t> infeasible_attributes(const IpaResult& ipa, const FeasibilityVector& f,
                                               double tau);

// Among valid rules: must contain the infeasible attribute, conclude the
// target class, and carry at least one other condition whose threshold
// exceeds that attribute's current mean. Picks the highest probability, then
// the highest support, then the lowest rule id.
std::optional<ClassificationRule> find_adjustment_rule(
    const std::vector<ClassificationRule>& valid_rules, std::size_t infeasible_attribute,
    const std::vector<double>& means, int target_class);

// Applies one rule's partition: infeasible-and-satisfied attributes drop to
// priority 4, feasible-but-unmet attributes rise to priority 1 with a
// quantified magnitude, everything else keeps its IPA priority. Throws when
// the rule cannot neutralize an infeasible attribute.
ImprovementPlan adjust_priorities(const IpaResult& ipa, const FeasibilityVector& f,
                                  const ClassificationRule& rule, const std::vector<double>& means,
                                  const PlanConfig& config = {});

// Full adjustment pass: processes infeasible attributes in descending IPA
// weight order, selecting one rule per attribute. An attribute promoted by an
// earlier rule is never demoted by a later one.
ImprovementPlan build_plan(const IpaResult& ipa, const FeasibilityVector& f,
                           const std::vector<ClassificationRule>& valid_rules,
                           const std::vector<double>& means, const PlanConfig& config = {});

} // namespace dtipa
