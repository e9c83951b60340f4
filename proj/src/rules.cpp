#include "dtipa/rules.hpp"

#include "dtipa/util.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace dtipa {

bool condition_met(double value, const RuleCondition& c) {
    return c.relation == Relation::less_equal ? value <= c.threshold : value > c.threshold;
}

bool satisfies(std::span<const int> row, const std::vector<RuleCondition>& conditions) {
    return std::all_of(conditions.begin(), conditions.end(), [&](const RuleCondition& c) {
        return condition_met(static_cast<double>(row[c.attribute]), c);
    });
}

std::vector<RuleCondition> merge_conditions(const std::vector<RuleCondition>& path) {
    struct Bounds {
        std::optional<double> lower; // from ">" conditions
        std::optional<double> upper; // from "<=" conditions
    };
    std::vector<std::size_t> order;
    std::map<std::size_t, Bounds> bounds;
    for (const auto& c : path) {
        auto [it, inserted] = bounds.try_emplace(c.attribute);
        if (inserted) order.push_back(c.attribute);
        Bounds& b = it->second;
        if (c.relation == Relation::greater) {
            b.lower = b.lower ? std::max(*b.lower, c.threshold) : c.threshold;
        } else {
            b.upper = b.upper ? std::min(*b.upper, c.threshold) : c.threshold;
        }
    }
    std::vector<RuleCondition> merged;
    for (std::size_t attr : order) {
        const Bounds& b = bounds.at(attr);
        if (b.lower) merged.push_back({attr, Relation::greater, *b.lower});
        if (b.upper) merged.push_back({attr, Relation::less_equal, *b.upper});
    }
    return merged;
}

ClassificationRule make_rule_from_counts(int rule_id, std::vector<RuleCondition> conditions,
                                         int conclusion, std::size_t matched_count,
                                         std::size_t condition_count, std::size_t total_count,
                                         const RuleThresholds& thresholds) {
    ClassificationRule r;
    r.rule_id = rule_id;
    r.conditions = std::move(conditions);
    r.conclusion = conclusion;
    r.matched_count = matched_count;
    r.condition_count = condition_count;
    r.total_count = total_count;
    const double total = static_cast<double>(total_count);
    r.support = total_count == 0 ? 0.0 : static_cast<double>(matched_count) / total;
    r.population = total_count == 0 ? 0.0 : static_cast<double>(condition_count) / total;
    r.probability = condition_count == 0
                        ? 0.0
                        : static_cast<double>(matched_count) / static_cast<double>(condition_count);
    r.valid = r.support >= thresholds.min_support && r.population >= thresholds.min_population &&
              r.probability >= thresholds.min_probability;
    return r;
}

namespace {

void extract_from(const TreeNode& node, std::vector<RuleCondition>& path, const SurveyMatrix& m,
                  const RuleThresholds& thresholds, std::vector<ClassificationRule>& out) {
    if (node.is_leaf()) {
        const auto conditions = merge_conditions(path);
        std::size_t condition_count = 0, matched_count = 0;
        const int conclusion = node.majority_class();
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (!satisfies(m.row(r), conditions)) continue;
            ++condition_count;
            if (m.overall_score(r) == conclusion) ++matched_count;
        }
        out.push_back(make_rule_from_counts(node.node_id, conditions, conclusion, matched_count,
                                            condition_count, m.rows(), thresholds));
        return;
    }
    path.push_back({node.split->attribute, Relation::less_equal, node.split->threshold});
    extract_from(*node.left, path, m, thresholds, out);
    path.back().relation = Relation::greater;
    extract_from(*node.right, path, m, thresholds, out);
    path.pop_back();
}

} // namespace

std::vector<ClassificationRule> extract_rules(const DecisionTree& t, const SurveyMatrix& m,
                                              const RuleThresholds& thresholds) {
    std::vector<ClassificationRule> rules;
    if (!t.root) return rules;
    std::vector<RuleCondition> path;
    extract_from(*t.root, path, m, thresholds, rules);
    return rules;
}

std::vector<ClassificationRule> filter_valid(const std::vector<ClassificationRule>& rules,
                                             const RuleThresholds& thresholds) {
    std::vector<ClassificationRule> out;
    for (ClassificationRule r : rules) {
        r.valid = r.support >= thresholds.min_support && r.population >= thresholds.min_population &&
                  r.probability >= thresholds.min_probability;
        if (r.valid) out.push_back(std::move(r));
    }
    return out;
}

std::string format_conditions(const std::vector<RuleCondition>& conditions,
                              const std::vector<std::string>& attribute_names) {
    if (conditions.empty()) return "(always)";
    std::string out;
    for (std::size_t i = 0; i < conditions.size(); ++i) {
        if (i > 0) out += " and ";
        const auto& c = conditions[i];
        out += attribute_names[c.attribute];
        out += c.relation == Relation::less_equal ? " <= " : " > ";
        out += format_fixed(c.threshold, 1);
    }
    return out;
}

} // namespace dtipa
