#include "dtipa/plan.hpp"

#include "dtipa/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace dtipa {

PlanEntry* ImprovementPlan::find(std::size_t attribute) {
    for (auto& e : entries) {
        if (e.attribute == attribute) return &e;
    }
    return nullptr;
}

const PlanEntry* ImprovementPlan::find(std::size_t attribute) const {
    for (const auto& e : entries) {
        if (e.attribute == attribute) return &e;
    }
    return nullptr;
}

std::vector<std::size_t> infeasible_attributes(const IpaResult& ipa, const FeasibilityVector& f,
                                               double tau) {
    std::vector<std::size_t> out;
    for (const auto& e : ipa.entries) {
        if (e.quadrant != Quadrant::priority_improve) continue;
        const auto feasibility = f.of(e.name);
        if (!feasibility) {
            throw std::runtime_error("feasibility not elicited for attribute '" + e.name + "'");
        }
        if (*feasibility < tau) out.push_back(e.attribute);
    }
    return out;
}

std::optional<ClassificationRule> find_adjustment_rule(
    const std::vector<ClassificationRule>& valid_rules, std::size_t infeasible_attribute,
    const std::vector<double>& means, int target_class) {
    const ClassificationRule* best = nullptr;
    for (const auto& r : valid_rules) {
        if (!r.valid || r.conclusion != target_class) continue;
        const bool contains = std::any_of(r.conditions.begin(), r.conditions.end(),
                                          [&](const RuleCondition& c) {
                                              return c.attribute == infeasible_attribute;
                                          });
        if (!contains) continue;
        const bool improvable = std::any_of(r.conditions.begin(), r.conditions.end(),
                                            [&](const RuleCondition& c) {
                                                return c.attribute != infeasible_attribute &&
                                                       c.threshold > means[c.attribute];
                                            });
        if (!improvable) continue;
        if (!best || r.probability > best->probability ||
            (r.probability == best->probability &&
             (r.support > best->support ||
              (r.support == best->support && r.rule_id < best->rule_id)))) {
            best = &r;
        }
    }
    if (!best) return std::nullopt;
    return *best;
}

namespace {

double round_up_to_granularity(double delta, double granularity) {
    // Tolerate float noise so an exact multiple stays put (4.5 - 4.21 must
    // round to 0.29, not 0.30).
    const double steps = std::ceil(delta / granularity - 1e-9);
    return std::max(steps, 1.0) * granularity;
}

ImprovementPlan plan_from_ipa(const IpaResult& ipa) {
    ImprovementPlan plan;
    for (const auto& e : ipa.entries) {
        PlanEntry entry;
        entry.attribute = e.attribute;
        entry.name = e.name;
        entry.initial_priority = e.initial_priority;
        entry.final_priority = e.initial_priority;
        plan.entries.push_back(std::move(entry));
    }
    return plan;
}

struct EntryState {
    bool promoted = false;
    bool demoted = false;
};

void apply_rule(ImprovementPlan& plan, std::map<std::size_t, EntryState>& state,
                const ClassificationRule& rule, const std::vector<std::size_t>& infeasible,
                const std::vector<double>& means, const PlanConfig& config) {
    const std::string rule_tag = "rule " + std::to_string(rule.rule_id);

    std::vector<std::size_t> order;
    std::map<std::size_t, std::vector<RuleCondition>> by_attribute;
    for (const auto& c : rule.conditions) {
        auto [it, inserted] = by_attribute.try_emplace(c.attribute);
        if (inserted) order.push_back(c.attribute);
        it->second.push_back(c);
    }

    for (std::size_t attr : order) {
        PlanEntry* entry = plan.find(attr);
        if (!entry) throw std::logic_error("rule condition on an attribute missing from the plan");
        EntryState& st = state[attr];
        const double mean = means[attr];
        const auto& conditions = by_attribute.at(attr);
        const bool satisfied = std::all_of(conditions.begin(), conditions.end(),
                                           [&](const RuleCondition& c) {
                                               return condition_met(mean, c);
                                           });
        const bool is_infeasible =
            std::find(infeasible.begin(), infeasible.end(), attr) != infeasible.end();

        if (is_infeasible) {
            if (!satisfied) {
                throw std::runtime_error("selected rule cannot neutralize infeasible attribute '" +
                                         entry->name + "' (its own condition is unmet)");
            }
            if (st.promoted) {
                plan.warnings.push_back(rule_tag + ": '" + entry->name +
                                        "' already promoted by an earlier rule; not demoted");
                continue;
            }
            entry->final_priority = 4;
            st.demoted = true;
            entry->rationale = rule_tag + ": infeasible; mean already meets its condition; demoted";
            continue;
        }

        if (satisfied) {
            if (entry->rationale.empty()) {
                entry->rationale = rule_tag + ": condition already met; priority unchanged";
            }
            continue;
        }

        // Feasible and unmet: promote and quantify. After merging, at most
        // one bound per direction exists, and the mean can miss only one of
        // them.
        for (const auto& c : conditions) {
            if (condition_met(mean, c)) continue;
            double magnitude = 0.0;
            bool reduce = false;
            if (c.relation == Relation::greater) {
                const double gap = c.threshold - mean;
                magnitude = gap <= 0.0 ? config.granularity
                                       : round_up_to_granularity(gap, config.granularity);
            } else {
                magnitude = round_up_to_granularity(mean - c.threshold + config.granularity,
                                                    config.granularity);
                reduce = true;
            }
            if (entry->magnitude && entry->reduce != reduce) {
                plan.warnings.push_back(rule_tag + ": '" + entry->name +
                                        "' needs an opposite-direction change; keeping the earlier target");
                continue;
            }
            if (!entry->magnitude || magnitude > *entry->magnitude) {
                entry->magnitude = magnitude;
                entry->reduce = reduce;
            }
            const std::string direction = reduce ? "lower" : "raise";
            entry->rationale = rule_tag + ": " + direction + " mean by >= " +
                               format_fixed(*entry->magnitude, 2) + " to meet '" +
                               (c.relation == Relation::greater ? "> " : "<= ") +
                               format_fixed(c.threshold, 1) + "' (mean " +
                               format_fixed(mean, 2) + ")";
        }
        entry->final_priority = 1;
        st.promoted = true;
    }
}

int default_target_class(const std::vector<ClassificationRule>& valid_rules) {
    int target = 0;
    bool found = false;
    for (const auto& r : valid_rules) {
        if (!found || r.conclusion > target) {
            target = r.conclusion;
            found = true;
        }
    }
    if (!found) throw std::runtime_error("no valid rules to derive a target class from");
    return target;
}

} // namespace

ImprovementPlan adjust_priorities(const IpaResult& ipa, const FeasibilityVector& f,
                                  const ClassificationRule& rule, const std::vector<double>& means,
                                  const PlanConfig& config) {
    ImprovementPlan plan = plan_from_ipa(ipa);
    const auto infeasible = infeasible_attributes(ipa, f, config.tau);
    std::map<std::size_t, EntryState> state;
    apply_rule(plan, state, rule, infeasible, means, config);

    std::size_t primary = rule.conditions.empty() ? 0 : rule.conditions.front().attribute;
    for (std::size_t attr : infeasible) {
        if (std::any_of(rule.conditions.begin(), rule.conditions.end(),
                        [&](const RuleCondition& c) { return c.attribute == attr; })) {
            primary = attr;
            break;
        }
    }
    plan.applications.push_back({primary, rule.rule_id, rule.conclusion, rule.probability});
    plan.selected_rule_id = rule.rule_id;
    plan.target_class = rule.conclusion;
    plan.probability = rule.probability;
    return plan;
}

ImprovementPlan build_plan(const IpaResult& ipa, const FeasibilityVector& f,
                           const std::vector<ClassificationRule>& valid_rules,
                           const std::vector<double>& means, const PlanConfig& config) {
    ImprovementPlan plan = plan_from_ipa(ipa);
    const auto infeasible = infeasible_attributes(ipa, f, config.tau);
    if (infeasible.empty()) {
        plan.warnings.push_back("no infeasible priority-1 attributes; IPA priorities unchanged");
        return plan;
    }

    // Highest-weight infeasible attributes are handled first.
    std::vector<std::size_t> ordered = infeasible;
    std::sort(ordered.begin(), ordered.end(), [&](std::size_t a, std::size_t b) {
        const double wa = ipa.find(a)->weight;
        const double wb = ipa.find(b)->weight;
        if (wa != wb) return wa > wb;
        return a < b;
    });

    const int target = config.target_class ? *config.target_class
                                           : default_target_class(valid_rules);

    std::map<std::size_t, EntryState> state;
    for (std::size_t attr : ordered) {
        if (state[attr].demoted) continue; // already neutralized by an earlier rule
        const auto rule = find_adjustment_rule(valid_rules, attr, means, target);
        if (!rule) {
            plan.warnings.push_back("no qualifying rule contains attribute '" +
                                    plan.find(attr)->name + "'; IPA priority kept");
            continue;
        }
        apply_rule(plan, state, *rule, infeasible, means, config);
        plan.applications.push_back({attr, rule->rule_id, target, rule->probability});
    }

    if (!plan.applications.empty()) {
        plan.selected_rule_id = plan.applications.front().rule_id;
        plan.target_class = plan.applications.front().target_class;
        plan.probability = plan.applications.front().probability;
    }
    return plan;
}

} // namespace dtipa
