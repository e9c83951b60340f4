#pragma once

#include "dtipa/cart.hpp"
#include "dtipa/survey.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dtipa {

// How the per-node error C(.) of weakest-link pruning is measured. The
// impurity reading keeps pruning consistent with the leaf-Gini error rate;
// the misclassification reading is experimental.
enum class NodeErrorKind {
    gini_impurity,
    misclassification,
};

// Leaf-size-weighted sum of leaf Gini impurities, with class counts
// recomputed from the given rows after routing them through the tree.
double misclassification_error(const DecisionTree& t, std::span<const std::size_t> rows,
                               const SurveyMatrix& m);

struct WeakestLinkResult {
    int node_id = 0;
    double alpha = 0.0;
};

// g(t) = (C(t) - C(T_t)) / (|T_t| - 1) over internal nodes, computed from the
// stored training counts. Minimal g wins; ties go to the larger subtree leaf
// count, then the lower node id. Throws on a root-only tree.
WeakestLinkResult weakest_link(const DecisionTree& t,
                               NodeErrorKind kind = NodeErrorKind::gini_impurity);

struct PruneSequence {
    std::vector<DecisionTree> trees; // T0 (saturated) .. Tn (root-only)
    std::vector<double> alphas;      // alphas[0] = 0, then one per pruning step
};

// Repeatedly collapses the weakest link until only the root remains.
PruneSequence prune_sequence(const DecisionTree& t0,
                             NodeErrorKind kind = NodeErrorKind::gini_impurity);

struct CvPoint {
    std::size_t leaf_count = 0;
    double mean_error = 0.0;
    double std_error = 0.0;
    std::vector<double> fold_errors; // one entry per fold, fold order
};

struct CvCurve {
    std::vector<CvPoint> points; // ascending leaf count, one per full-sequence size
    std::size_t k = 10;
    std::uint64_t fold_seed = 0;
    std::vector<std::string> warnings;
};

// Class-stratified fold assignment; folds are disjoint, cover every row, and
// differ in size by at most one.
std::vector<std::vector<std::size_t>> stratified_folds(const SurveyMatrix& m, std::size_t k,
                                                       std::uint64_t seed);

// Per fold: grow a saturated tree on the other k-1 folds, build its pruning
// sequence, and score every subtree on the held-out fold. Errors aggregate by
// the full-data sequence's leaf counts; when a fold sequence lacks a size,
// its largest tree not exceeding that size stands in.
CvCurve cross_validate(const SurveyMatrix& m, const GrowthConfig& config, std::size_t k = 10,
                       std::uint64_t seed = 0, const PruneSequence* full_sequence = nullptr,
                       NodeErrorKind kind = NodeErrorKind::gini_impurity);

// One-standard-error rule: smallest size whose mean error is within one
// standard error of the minimum; returns that tree from the full-data
// sequence (nearest smaller size if absent).
DecisionTree select_optimal(const CvCurve& curve, const PruneSequence& full_sequence);

} // namespace dtipa
