#pragma once

#include "dtipa/ahp.hpp"
#include "dtipa/analysis.hpp"
#include "dtipa/cart.hpp"
#include "dtipa/plan.hpp"
#include "dtipa/prune.hpp"
#include "dtipa/rules.hpp"
#include "dtipa/survey.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dtipa {

struct PipelineConfig {
    std::string overall_column = "overall";
    int scale_min = 1;
    int scale_max = 5;
    std::size_t k = 10;
    std::uint64_t seed = 0;
    std::size_t min_leaf_size = 5;
    std::size_t min_child_size = 1;
    RuleThresholds rule_thresholds{};
    double tau = 0.1;
    double granularity = 0.01;
    double alpha_threshold = 0.7;
    bool alpha_include_overall = true;
    bool nonzero_weight_mean = false;
    bool normalize_weights = false; // display only
    NodeErrorKind prune_error_kind = NodeErrorKind::gini_impurity; // experimental alternative: misclassification
    std::optional<int> target_class;
    std::string format = "text"; // json | tsv | text

    void validate() const;
    GrowthConfig growth() const { return {min_leaf_size, min_child_size}; }
    PlanConfig plan() const { return {tau, granularity, target_class}; }
};

struct FitArtifacts {
    DecisionTree saturated;
    PruneSequence sequence;
    CvCurve curve;
    DecisionTree optimal;
};

// Grows the saturated tree, builds the pruning sequence, cross-validates and
// applies the one-standard-error rule.
FitArtifacts fit_survey(const SurveyMatrix& m, const PipelineConfig& config);

// Training error of each sequence size plus the cross-validated mean/stderr:
// the data behind the size-vs-error curve.
struct CurveRow {
    std::size_t leaf_count = 0;
    double train_error = 0.0;
    double cv_mean = 0.0;
    double cv_stderr = 0.0;
};
std::vector<CurveRow> curve_rows(const FitArtifacts& fit, const SurveyMatrix& m);
std::string prune_curve_tsv(const std::vector<CurveRow>& rows);

std::string ipa_tsv(const IpaResult& ipa, bool normalize_weights = false);
std::string rules_tsv(const std::vector<ClassificationRule>& rules,
                      const std::vector<std::string>& attribute_names);
std::string rules_text(const std::vector<ClassificationRule>& rules,
                       const std::vector<std::string>& attribute_names);
std::string plan_tsv(const ImprovementPlan& plan);
std::string plan_text(const ImprovementPlan& plan);

struct Report {
    PipelineConfig config;
    std::string survey_digest;
    std::string judgments_digest;
    std::vector<std::string> attribute_names;
    std::size_t overall_index = 0;
    ValidationReport validation;
    std::vector<CurveRow> curve;
    std::vector<std::string> cv_warnings;
    nlohmann::ordered_json optimal_tree;
    std::size_t saturated_leaves = 0;
    std::size_t optimal_leaves = 0;
    std::size_t optimal_depth = 0;
    double optimal_cv_mean = 0.0;
    double optimal_cv_stderr = 0.0;
    std::vector<double> means;
    WeightVector weights;
    IpaResult ipa;
    std::vector<ClassificationRule> rules; // every extracted rule, validity flagged
    FeasibilityVector feasibility;
    ImprovementPlan plan;

    nlohmann::ordered_json to_json() const;
    std::string to_text() const;
};

// The whole pipeline: fit, weights, IPA, rules, feasibility, adjustment.
Report run_plan(const SurveyMatrix& m, const ValidationReport& validation,
                const JudgmentMatrix& judgments, const PipelineConfig& config,
                std::string survey_digest = {}, std::string judgments_digest = {});

} // namespace dtipa
