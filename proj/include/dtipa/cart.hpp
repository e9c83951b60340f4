#pragma once

#include "dtipa/survey.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

namespace dtipa {

// Per-class row counts of one tree node.
struct ClassCounts {
    std::map<int, std::size_t> counts;
    std::size_t total = 0;

    void add(int cls, std::size_t n = 1) {
        counts[cls] += n;
        total += n;
    }
    std::size_t count_of(int cls) const {
        const auto it = counts.find(cls);
        return it == counts.end() ? 0 : it->second;
    }
    bool operator==(const ClassCounts&) const = default;
};

// 1 - sum((count/total)^2). Throws on an empty node.
double gini(const ClassCounts& c);

// Gini(parent) minus the size-weighted Gini of the two children. Throws when
// the children do not partition the parent.
double split_gain(const ClassCounts& parent, const ClassCounts& left, const ClassCounts& right);

// Binary split on one attribute: left = "score <= threshold", right = ">".
struct Split {
    std::size_t attribute = 0;
    double threshold = 0.0;
    bool operator==(const Split&) const = default;
};

struct GrowthConfig {
    std::size_t min_leaf_size = 5;  // nodes at or below this size stop splitting
    std::size_t min_child_size = 1; // a split must leave each child at least this many rows
    bool operator==(const GrowthConfig&) const = default;
};

struct TreeNode {
    int node_id = 0;
    ClassCounts class_counts;
    std::optional<Split> split;
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;
    std::vector<std::size_t> member_rows; // training rows that reached this node

    bool is_leaf() const { return !split.has_value(); }
    // Majority ties break toward the lower class score.
    int majority_class() const;
};

class DecisionTree {
public:
    std::unique_ptr<TreeNode> root;
    std::vector<int> class_labels; // distinct overall scores, ascending
    GrowthConfig growth_config;

    DecisionTree clone() const;
    std::size_t leaf_count() const;
    std::size_t node_count() const;
    std::size_t depth() const; // root-only tree has depth 0
    TreeNode* find_node(int node_id);
    const TreeNode* find_node(int node_id) const;
    std::vector<const TreeNode*> nodes_preorder() const;
    std::vector<TreeNode*> nodes_preorder();
    std::vector<const TreeNode*> leaves_preorder() const;
};

// Exhaustive search over every (attribute != overall, midpoint threshold)
// candidate producing two nonempty children; returns the gain maximizer, or
// nullopt when no candidate improves on zero gain. Ties break to the lowest
// attribute index, then the lowest threshold.
std::optional<Split> best_split(std::span<const std::size_t> rows, const SurveyMatrix& m);

DecisionTree grow_tree(const SurveyMatrix& m, const GrowthConfig& config = {});
DecisionTree grow_tree(const SurveyMatrix& m, const GrowthConfig& config,
                       std::vector<std::size_t> rows);

// Routes the row by the <=/> convention and returns the leaf majority class.
int predict(const DecisionTree& t, std::span<const int> row);

nlohmann::ordered_json tree_to_json(const DecisionTree& t);
DecisionTree tree_from_json(const nlohmann::ordered_json& j);

} // namespace dtipa
