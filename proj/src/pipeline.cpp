#include "dtipa/pipeline.hpp"

#include "dtipa/util.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dtipa {

namespace {

void require_unit_interval(double value, const char* name) {
    if (!(value > 0.0) || value > 1.0) {
        throw std::invalid_argument(std::string(name) + " must lie in (0, 1]");
    }
}

} // namespace

void PipelineConfig::validate() const {
    if (k < 2) throw std::invalid_argument("k must be at least 2");
    if (!(granularity > 0.0)) throw std::invalid_argument("granularity must be positive");
    require_unit_interval(rule_thresholds.min_support, "support threshold");
    require_unit_interval(rule_thresholds.min_population, "population threshold");
    require_unit_interval(rule_thresholds.min_probability, "probability threshold");
    require_unit_interval(tau, "tau");
    require_unit_interval(alpha_threshold, "alpha threshold");
    if (scale_min >= scale_max) throw std::invalid_argument("scale_min must be below scale_max");
    if (format != "text" && format != "json" && format != "tsv") {
        throw std::invalid_argument("format must be one of text, json, tsv");
    }
}

FitArtifacts fit_survey(const SurveyMatrix& m, const PipelineConfig& config) {
    FitArtifacts fit;
    fit.saturated = grow_tree(m, config.growth());
    fit.sequence = prune_sequence(fit.saturated, config.prune_error_kind);
    fit.curve = cross_validate(m, config.growth(), config.k, config.seed, &fit.sequence,
                               config.prune_error_kind);
    fit.optimal = select_optimal(fit.curve, fit.sequence);
    return fit;
}

std::vector<CurveRow> curve_rows(const FitArtifacts& fit, const SurveyMatrix& m) {
    std::vector<std::size_t> all(m.rows());
    for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;

    std::map<std::size_t, double> train_error;
    for (const auto& tree : fit.sequence.trees) {
        train_error[tree.leaf_count()] = misclassification_error(tree, all, m);
    }
    std::vector<CurveRow> rows;
    for (const auto& p : fit.curve.points) {
        CurveRow row;
        row.leaf_count = p.leaf_count;
        row.train_error = train_error.count(p.leaf_count) ? train_error.at(p.leaf_count) : 0.0;
        row.cv_mean = p.mean_error;
        row.cv_stderr = p.std_error;
        rows.push_back(row);
    }
    return rows;
}

std::string prune_curve_tsv(const std::vector<CurveRow>& rows) {
    std::string out = "leaf_count\ttrain_error\tcv_mean\tcv_stderr\n";
    for (const auto& r : rows) {
        out += std::to_string(r.leaf_count) + '\t' + format_fixed(r.train_error, 6) + '\t' +
               format_fixed(r.cv_mean, 6) + '\t' + format_fixed(r.cv_stderr, 6) + '\n';
    }
    return out;
}

std::string ipa_tsv(const IpaResult& ipa, bool normalize_weights) {
    double scale = 1.0;
    if (normalize_weights) {
        double total = 0.0;
        for (const auto& e : ipa.entries) total += e.weight;
        if (total > 0.0) scale = 1.0 / total;
    }
    std::string out;
    out += "# grand_mean\t" + format_fixed(ipa.grand_mean, 6) + '\n';
    out += "# mean_weight\t" + format_fixed(ipa.mean_weight * scale, 6) + '\n';
    out += "attribute\tmean\tweight\tquadrant\tpriority\n";
    for (const auto& e : ipa.entries) {
        out += e.name + '\t' + format_fixed(e.mean, 6) + '\t' +
               format_fixed(e.weight * scale, 6) + '\t' + std::string(quadrant_code(e.quadrant)) +
               '\t' + std::to_string(e.initial_priority) + '\n';
    }
    return out;
}

std::string rules_tsv(const std::vector<ClassificationRule>& rules,
                      const std::vector<std::string>& attribute_names) {
    std::string out = "id\tif\tthen\tsupport\tpopulation\tprobability\tvalid\n";
    for (const auto& r : rules) {
        out += std::to_string(r.rule_id) + '\t' + format_conditions(r.conditions, attribute_names) +
               '\t' + std::to_string(r.conclusion) + '\t' + format_fixed(r.support, 3) + '\t' +
               format_fixed(r.population, 3) + '\t' + format_fixed(r.probability, 3) + '\t' +
               (r.valid ? "true" : "false") + '\n';
    }
    return out;
}

std::string rules_text(const std::vector<ClassificationRule>& rules,
                       const std::vector<std::string>& attribute_names) {
    std::string out;
    for (const auto& r : rules) {
        out += "rule " + std::to_string(r.rule_id) + ": if " +
               format_conditions(r.conditions, attribute_names) + " then overall = " +
               std::to_string(r.conclusion) + "  [S=" + format_fixed(r.support, 3) +
               " Po=" + format_fixed(r.population, 3) + " P=" + format_fixed(r.probability, 3) +
               (r.valid ? " valid" : " invalid") + "]\n";
    }
    return out;
}

namespace {

std::string magnitude_text(const PlanEntry& e) {
    if (!e.magnitude) return "-";
    return std::string(e.reduce ? "-" : "+") + ">= " + format_fixed(*e.magnitude, 2);
}

} // namespace

std::string plan_tsv(const ImprovementPlan& plan) {
    std::string out = "attribute\tipa_priority\tdtipa_priority\tmagnitude\trationale\n";
    for (const auto& e : plan.entries) {
        out += e.name + '\t' + std::to_string(e.initial_priority) + '\t' +
               std::to_string(e.final_priority) + '\t' +
               (e.magnitude ? format_fixed(*e.magnitude, 2) : std::string("-")) + '\t' +
               (e.rationale.empty() ? "-" : e.rationale) + '\n';
    }
    return out;
}

std::string plan_text(const ImprovementPlan& plan) {
    std::string out;
    out += "attribute                 IPA  DT-IPA  magnitude\n";
    for (const auto& e : plan.entries) {
        std::string name = e.name;
        if (name.size() < 25) name.append(25 - name.size(), ' ');
        out += name + " " + std::to_string(e.initial_priority) + "    " +
               std::to_string(e.final_priority) + "       " + magnitude_text(e) + '\n';
    }
    if (plan.selected_rule_id) {
        out += "selected rule: " + std::to_string(*plan.selected_rule_id) + ", target overall = " +
               std::to_string(*plan.target_class) + ", probability " +
               format_fixed(*plan.probability, 3) + '\n';
    }
    for (const auto& w : plan.warnings) out += "note: " + w + '\n';
    return out;
}

namespace {

nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
    nlohmann::ordered_json j;
    j["overall_column"] = c.overall_column;
    j["scale_min"] = c.scale_min;
    j["scale_max"] = c.scale_max;
    j["k"] = c.k;
    j["seed"] = c.seed;
    j["min_leaf_size"] = c.min_leaf_size;
    j["min_child_size"] = c.min_child_size;
    j["min_support"] = c.rule_thresholds.min_support;
    j["min_population"] = c.rule_thresholds.min_population;
    j["min_probability"] = c.rule_thresholds.min_probability;
    j["tau"] = c.tau;
    j["granularity"] = c.granularity;
    j["alpha_threshold"] = c.alpha_threshold;
    j["alpha_include_overall"] = c.alpha_include_overall;
    j["nonzero_weight_mean"] = c.nonzero_weight_mean;
    j["normalize_weights"] = c.normalize_weights;
    j["prune_error_kind"] =
        c.prune_error_kind == NodeErrorKind::gini_impurity ? "gini" : "misclassification";
    if (c.target_class) {
        j["target_class"] = *c.target_class;
    } else {
        j["target_class"] = nullptr;
    }
    return j;
}

nlohmann::ordered_json rule_to_json(const ClassificationRule& r,
                                    const std::vector<std::string>& names) {
    nlohmann::ordered_json j;
    j["id"] = r.rule_id;
    nlohmann::ordered_json conds = nlohmann::ordered_json::array();
    for (const auto& c : r.conditions) {
        conds.push_back({{"attribute", names[c.attribute]},
                         {"relation", c.relation == Relation::less_equal ? "<=" : ">"},
                         {"threshold", c.threshold}});
    }
    j["if"] = std::move(conds);
    j["then"] = r.conclusion;
    j["matched_count"] = r.matched_count;
    j["condition_count"] = r.condition_count;
    j["total_count"] = r.total_count;
    j["support"] = r.support;
    j["population"] = r.population;
    j["probability"] = r.probability;
    j["valid"] = r.valid;
    return j;
}

} // namespace

nlohmann::ordered_json Report::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;

    nlohmann::ordered_json prov;
    prov["tool"] = "dtipa";
    prov["config"] = config_to_json(config);
    prov["inputs"] = {{"survey_fnv1a64", survey_digest}, {"judgments_fnv1a64", judgments_digest}};
    j["provenance"] = std::move(prov);

    nlohmann::ordered_json v;
    v["rows_loaded"] = validation.rows_loaded;
    nlohmann::ordered_json rejected = nlohmann::ordered_json::array();
    for (const auto& r : validation.rows_rejected) {
        rejected.push_back({{"line", r.line}, {"reason", r.reason}});
    }
    v["rows_rejected"] = std::move(rejected);
    v["duplicate_rows"] = validation.duplicate_rows;
    v["cronbach_alpha"] = validation.cronbach_alpha;
    v["alpha_threshold"] = validation.alpha_threshold;
    v["reliable"] = validation.reliable;
    j["validation"] = std::move(v);

    nlohmann::ordered_json tree;
    tree["saturated_leaves"] = saturated_leaves;
    tree["optimal_leaves"] = optimal_leaves;
    tree["optimal_depth"] = optimal_depth;
    tree["cv_error"] = {{"mean", optimal_cv_mean}, {"stderr", optimal_cv_stderr}};
    tree["model"] = optimal_tree;
    j["tree"] = std::move(tree);

    nlohmann::ordered_json curve_json = nlohmann::ordered_json::array();
    for (const auto& row : curve) {
        curve_json.push_back({{"leaf_count", row.leaf_count},
                              {"train_error", row.train_error},
                              {"cv_mean", row.cv_mean},
                              {"cv_stderr", row.cv_stderr}});
    }
    j["prune_curve"] = std::move(curve_json);
    j["cv_warnings"] = cv_warnings;

    nlohmann::ordered_json weights_json = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < attribute_names.size(); ++c) {
        if (c == overall_index) continue;
        weights_json[attribute_names[c]] = weights.weights[c];
    }
    j["weights"] = std::move(weights_json);

    nlohmann::ordered_json ipa_json;
    ipa_json["grand_mean"] = ipa.grand_mean;
    ipa_json["mean_weight"] = ipa.mean_weight;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& e : ipa.entries) {
        entries.push_back({{"attribute", e.name},
                           {"mean", e.mean},
                           {"weight", e.weight},
                           {"quadrant", std::string(quadrant_code(e.quadrant))},
                           {"priority", e.initial_priority}});
    }
    ipa_json["entries"] = std::move(entries);
    j["ipa"] = std::move(ipa_json);

    nlohmann::ordered_json rules_json = nlohmann::ordered_json::array();
    for (const auto& r : rules) rules_json.push_back(rule_to_json(r, attribute_names));
    j["rules"] = std::move(rules_json);

    nlohmann::ordered_json feas;
    feas["lambda_max"] = feasibility.lambda_max;
    feas["consistency_index"] = feasibility.ci;
    feas["consistency_ratio"] = feasibility.cr;
    nlohmann::ordered_json feas_values = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < feasibility.labels.size(); ++i) {
        feas_values[feasibility.labels[i]] = feasibility.values[i];
    }
    feas["values"] = std::move(feas_values);
    j["feasibility"] = std::move(feas);

    nlohmann::ordered_json plan_json;
    if (plan.selected_rule_id) {
        plan_json["selected_rule"] = *plan.selected_rule_id;
        plan_json["target_class"] = *plan.target_class;
        plan_json["probability"] = *plan.probability;
    } else {
        plan_json["selected_rule"] = nullptr;
        plan_json["target_class"] = nullptr;
        plan_json["probability"] = nullptr;
    }
    nlohmann::ordered_json plan_entries = nlohmann::ordered_json::array();
    for (const auto& e : plan.entries) {
        nlohmann::ordered_json pe;
        pe["attribute"] = e.name;
        pe["initial_priority"] = e.initial_priority;
        pe["final_priority"] = e.final_priority;
        if (e.magnitude) {
            pe["magnitude"] = *e.magnitude;
            pe["direction"] = e.reduce ? "lower" : "raise";
        } else {
            pe["magnitude"] = nullptr;
            pe["direction"] = nullptr;
        }
        pe["rationale"] = e.rationale;
        plan_entries.push_back(std::move(pe));
    }
    plan_json["entries"] = std::move(plan_entries);
    nlohmann::ordered_json applications = nlohmann::ordered_json::array();
    for (const auto& a : plan.applications) {
        applications.push_back({{"attribute", attribute_names[a.infeasible_attribute]},
                                {"rule_id", a.rule_id},
                                {"target_class", a.target_class},
                                {"probability", a.probability}});
    }
    plan_json["applications"] = std::move(applications);
    plan_json["warnings"] = plan.warnings;
    j["plan"] = std::move(plan_json);

    return j;
}

std::string Report::to_text() const {
    std::ostringstream out;
    out << "== survey ==\n";
    out << "rows loaded: " << validation.rows_loaded
        << ", rejected: " << validation.rows_rejected.size()
        << ", duplicates flagged: " << validation.duplicate_rows.size() << '\n';
    out << "cronbach alpha: " << format_fixed(validation.cronbach_alpha, 3) << " (threshold "
        << format_fixed(validation.alpha_threshold, 2) << ") -> "
        << (validation.reliable ? "reliable" : "NOT reliable") << '\n';

    out << "\n== decision tree ==\n";
    out << "saturated leaves: " << saturated_leaves << ", optimal leaves: " << optimal_leaves
        << ", depth: " << optimal_depth << '\n';
    out << "cv error at optimal size: " << format_fixed(optimal_cv_mean, 4) << " +/- "
        << format_fixed(optimal_cv_stderr, 4) << '\n';
    for (const auto& w : cv_warnings) out << "note: " << w << '\n';

    out << "\n== importance-performance ==\n";
    out << "grand mean: " << format_fixed(ipa.grand_mean, 4)
        << ", mean weight: " << format_fixed(ipa.mean_weight, 4) << '\n';
    for (const auto& e : ipa.entries) {
        std::string name = e.name;
        if (name.size() < 25) name.append(25 - name.size(), ' ');
        out << name << " mean " << format_fixed(e.mean, 4) << "  weight "
            << format_fixed(e.weight, 4) << "  " << quadrant_code(e.quadrant) << " ("
            << quadrant_name(e.quadrant) << ")\n";
    }

    out << "\n== classification rules ==\n";
    out << rules_text(rules, attribute_names);

    out << "\n== improvement feasibility ==\n";
    out << "lambda_max " << format_fixed(feasibility.lambda_max, 4) << ", CI "
        << format_fixed(feasibility.ci, 4) << ", CR " << format_fixed(feasibility.cr, 4) << '\n';
    for (std::size_t i = 0; i < feasibility.labels.size(); ++i) {
        out << feasibility.labels[i] << ": " << format_fixed(feasibility.values[i], 3) << '\n';
    }

    out << "\n== improvement plan ==\n";
    out << plan_text(plan);
    return out.str();
}

Report run_plan(const SurveyMatrix& m, const ValidationReport& validation,
                const JudgmentMatrix& judgments, const PipelineConfig& config,
                std::string survey_digest, std::string judgments_digest) {
    config.validate();

    Report report;
    report.config = config;
    report.survey_digest = std::move(survey_digest);
    report.judgments_digest = std::move(judgments_digest);
    report.attribute_names = m.attribute_names;
    report.overall_index = m.overall_index;
    report.validation = validation;

    FitArtifacts fit = fit_survey(m, config);
    report.curve = curve_rows(fit, m);
    report.cv_warnings = fit.curve.warnings;
    report.saturated_leaves = fit.saturated.leaf_count();
    report.optimal_leaves = fit.optimal.leaf_count();
    report.optimal_depth = fit.optimal.depth();
    for (const auto& p : fit.curve.points) {
        if (p.leaf_count == report.optimal_leaves) {
            report.optimal_cv_mean = p.mean_error;
            report.optimal_cv_stderr = p.std_error;
        }
    }
    report.optimal_tree = tree_to_json(fit.optimal);

    report.means = attribute_means(m);
    report.weights = attribute_weights(fit.optimal, m.cols(), m.overall_index);
    report.ipa = ipa_classify(m, report.means, report.weights, config.nonzero_weight_mean);
    report.rules = extract_rules(fit.optimal, m, config.rule_thresholds);
    const auto valid = filter_valid(report.rules, config.rule_thresholds);
    report.feasibility = feasibility_vector(judgments);

    PlanConfig plan_config = config.plan();
    if (!plan_config.target_class) {
        // Highest overall score present in the data.
        plan_config.target_class = m.scale_min;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            plan_config.target_class = std::max(*plan_config.target_class, m.overall_score(r));
        }
    }
    report.plan = build_plan(report.ipa, report.feasibility, valid, report.means, plan_config);
    return report;
}

} // namespace dtipa
