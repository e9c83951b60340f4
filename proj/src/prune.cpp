#include "dtipa/prune.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace dtipa {

double misclassification_error(const DecisionTree& t, std::span<const std::size_t> rows,
                               const SurveyMatrix& m) {
    if (rows.empty()) throw std::invalid_argument("misclassification_error: empty row set");
    if (!t.root) throw std::logic_error("misclassification_error: empty tree");

    std::map<int, ClassCounts> leaf_counts;
    for (std::size_t r : rows) {
        const TreeNode* n = t.root.get();
        while (!n->is_leaf()) {
            const double value = static_cast<double>(m.score(r, n->split->attribute));
            n = value <= n->split->threshold ? n->left.get() : n->right.get();
        }
        leaf_counts[n->node_id].add(m.overall_score(r));
    }
    const double total = static_cast<double>(rows.size());
    double error = 0.0;
    for (const auto& [leaf_id, counts] : leaf_counts) {
        (void)leaf_id;
        error += (static_cast<double>(counts.total) / total) * gini(counts);
    }
    return error;
}

namespace {

double node_error(const TreeNode& n, double root_total, NodeErrorKind kind) {
    const double weight = static_cast<double>(n.class_counts.total) / root_total;
    if (kind == NodeErrorKind::gini_impurity) return weight * gini(n.class_counts);
    std::size_t majority = 0;
    for (const auto& [cls, count] : n.class_counts.counts) {
        (void)cls;
        majority = std::max(majority, count);
    }
    return static_cast<double>(n.class_counts.total - majority) / root_total;
}

struct LinkCandidate {
    int node_id;
    double g;
    std::size_t subtree_leaves;
};

struct SubtreeStats {
    double leaf_error_sum;
    std::size_t leaf_count;
};

SubtreeStats collect_links(const TreeNode& n, double root_total, NodeErrorKind kind,
                           std::vector<LinkCandidate>& out) {
    if (n.is_leaf()) return {node_error(n, root_total, kind), 1};
    const SubtreeStats l = collect_links(*n.left, root_total, kind, out);
    const SubtreeStats r = collect_links(*n.right, root_total, kind, out);
    const SubtreeStats s{l.leaf_error_sum + r.leaf_error_sum, l.leaf_count + r.leaf_count};
    const double g = (node_error(n, root_total, kind) - s.leaf_error_sum) /
                     static_cast<double>(s.leaf_count - 1);
    out.push_back({n.node_id, g, s.leaf_count});
    return s;
}

} // namespace

WeakestLinkResult weakest_link(const DecisionTree& t, NodeErrorKind kind) {
    if (!t.root || t.root->is_leaf()) throw std::invalid_argument("weakest_link: nothing to prune");
    std::vector<LinkCandidate> candidates;
    collect_links(*t.root, static_cast<double>(t.root->class_counts.total), kind, candidates);
    const auto better = [](const LinkCandidate& a, const LinkCandidate& b) {
        if (a.g != b.g) return a.g < b.g;
        if (a.subtree_leaves != b.subtree_leaves) return a.subtree_leaves > b.subtree_leaves;
        return a.node_id < b.node_id;
    };
    const auto best = std::min_element(candidates.begin(), candidates.end(), better);
    return {best->node_id, best->g};
}

PruneSequence prune_sequence(const DecisionTree& t0, NodeErrorKind kind) {
    PruneSequence seq;
    seq.trees.push_back(t0.clone());
    seq.alphas.push_back(0.0);
    while (seq.trees.back().leaf_count() > 1) {
        const WeakestLinkResult link = weakest_link(seq.trees.back(), kind);
        DecisionTree next = seq.trees.back().clone();
        TreeNode* n = next.find_node(link.node_id);
        n->split.reset();
        n->left.reset();
        n->right.reset();
        seq.trees.push_back(std::move(next));
        seq.alphas.push_back(link.alpha);
    }
    return seq;
}

std::vector<std::vector<std::size_t>> stratified_folds(const SurveyMatrix& m, std::size_t k,
                                                       std::uint64_t seed) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t r = 0; r < m.rows(); ++r) by_class[m.overall_score(r)].push_back(r);

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> dealt;
    dealt.reserve(m.rows());
    for (auto& [cls, members] : by_class) {
        (void)cls;
        std::shuffle(members.begin(), members.end(), rng);
        dealt.insert(dealt.end(), members.begin(), members.end());
    }
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t i = 0; i < dealt.size(); ++i) folds[i % k].push_back(dealt[i]);
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

CvCurve cross_validate(const SurveyMatrix& m, const GrowthConfig& config, std::size_t k,
                       std::uint64_t seed, const PruneSequence* full_sequence,
                       NodeErrorKind kind) {
    const std::size_t n = m.rows();
    if (k < 2) throw std::invalid_argument("cross_validate: fold count must be at least 2");
    if (k > n) {
        throw std::invalid_argument("cross_validate: k exceeds N (k=" + std::to_string(k) +
                                    ", N=" + std::to_string(n) + ")");
    }

    CvCurve curve;
    curve.k = k;
    curve.fold_seed = seed;

    PruneSequence local_sequence;
    if (!full_sequence) {
        local_sequence = prune_sequence(grow_tree(m, config), kind);
        full_sequence = &local_sequence;
    }
    std::vector<std::size_t> target_sizes;
    for (const auto& tree : full_sequence->trees) target_sizes.push_back(tree.leaf_count());
    std::sort(target_sizes.begin(), target_sizes.end());
    target_sizes.erase(std::unique(target_sizes.begin(), target_sizes.end()), target_sizes.end());

    const auto folds = stratified_folds(m, k, seed);
    {
        std::map<int, std::size_t> class_sizes;
        for (std::size_t r = 0; r < n; ++r) ++class_sizes[m.overall_score(r)];
        for (const auto& [cls, count] : class_sizes) {
            if (count < k) {
                curve.warnings.push_back("class " + std::to_string(cls) + " has only " +
                                         std::to_string(count) + " rows (fewer than k=" +
                                         std::to_string(k) + "); folds cannot all contain it");
            }
        }
    }

    // Per fold, (leaf_count, held-out error) for every subtree, leaf counts descending.
    std::vector<std::vector<std::pair<std::size_t, double>>> fold_curves(k);
    std::vector<bool> in_fold(n, false);
    for (std::size_t f = 0; f < k; ++f) {
        std::fill(in_fold.begin(), in_fold.end(), false);
        for (std::size_t r : folds[f]) in_fold[r] = true;
        std::vector<std::size_t> train;
        train.reserve(n - folds[f].size());
        for (std::size_t r = 0; r < n; ++r) {
            if (!in_fold[r]) train.push_back(r);
        }
        const PruneSequence seq = prune_sequence(grow_tree(m, config, std::move(train)), kind);
        for (const auto& tree : seq.trees) {
            fold_curves[f].emplace_back(tree.leaf_count(),
                                        misclassification_error(tree, folds[f], m));
        }
    }

    for (std::size_t size : target_sizes) {
        CvPoint point;
        point.leaf_count = size;
        for (std::size_t f = 0; f < k; ++f) {
            // Largest subtree of this fold not exceeding the target size; the
            // root-only tree (1 leaf) guarantees a match.
            double error = 0.0;
            std::size_t best = 0;
            for (const auto& [leaves, err] : fold_curves[f]) {
                if (leaves <= size && leaves >= best) {
                    best = leaves;
                    error = err;
                }
            }
            point.fold_errors.push_back(error);
        }
        double mean = 0.0;
        for (double e : point.fold_errors) mean += e;
        mean /= static_cast<double>(k);
        double ss = 0.0;
        for (double e : point.fold_errors) ss += (e - mean) * (e - mean);
        const double stddev = std::sqrt(ss / static_cast<double>(k - 1));
        point.mean_error = mean;
        point.std_error = stddev / std::sqrt(static_cast<double>(k));
        curve.points.push_back(std::move(point));
    }
    return curve;
}

DecisionTree select_optimal(const CvCurve& curve, const PruneSequence& full_sequence) {
    if (curve.points.empty()) throw std::invalid_argument("select_optimal: empty curve");
    if (full_sequence.trees.empty()) throw std::invalid_argument("select_optimal: empty sequence");

    // Points are ascending by leaf count, so strict < keeps the smallest
    // tree among equal-error minima.
    const CvPoint* best = &curve.points.front();
    for (const CvPoint& p : curve.points) {
        if (p.mean_error < best->mean_error) best = &p;
    }
    const double limit = best->mean_error + best->std_error;
    std::size_t chosen = best->leaf_count;
    for (const CvPoint& p : curve.points) {
        if (p.mean_error <= limit) {
            chosen = p.leaf_count;
            break;
        }
    }

    const DecisionTree* pick = nullptr;
    for (const auto& tree : full_sequence.trees) {
        const std::size_t leaves = tree.leaf_count();
        if (leaves <= chosen && (!pick || leaves > pick->leaf_count())) pick = &tree;
    }
    if (!pick) pick = &full_sequence.trees.back();
    return pick->clone();
}

} // namespace dtipa
