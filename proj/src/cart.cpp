#include "dtipa/cart.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace dtipa {

double gini(const ClassCounts& c) {
    if (c.total == 0) throw std::invalid_argument("gini: empty node");
    const double total = static_cast<double>(c.total);
    double sum_sq = 0.0;
    for (const auto& [cls, n] : c.counts) {
        (void)cls;
        const double p = static_cast<double>(n) / total;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

double split_gain(const ClassCounts& parent, const ClassCounts& left, const ClassCounts& right) {
    if (left.total + right.total != parent.total) {
        throw std::invalid_argument("split_gain: children do not partition parent");
    }
    for (const auto& [cls, n] : parent.counts) {
        if (left.count_of(cls) + right.count_of(cls) != n) {
            throw std::invalid_argument("split_gain: children do not partition parent");
        }
    }
    const double total = static_cast<double>(parent.total);
    double children = 0.0;
    if (left.total > 0) children += (static_cast<double>(left.total) / total) * gini(left);
    if (right.total > 0) children += (static_cast<double>(right.total) / total) * gini(right);
    return gini(parent) - children;
}

int TreeNode::majority_class() const {
    if (class_counts.total == 0) throw std::logic_error("majority_class: empty node");
    int best_class = 0;
    std::size_t best_count = 0;
    for (const auto& [cls, n] : class_counts.counts) { // ascending class order
        if (n > best_count) {
            best_class = cls;
            best_count = n;
        }
    }
    return best_class;
}

namespace {

std::unique_ptr<TreeNode> clone_node(const TreeNode& n) {
    auto out = std::make_unique<TreeNode>();
    out->node_id = n.node_id;
    out->class_counts = n.class_counts;
    out->split = n.split;
    out->member_rows = n.member_rows;
    if (n.left) out->left = clone_node(*n.left);
    if (n.right) out->right = clone_node(*n.right);
    return out;
}

template <typename Node, typename Out>
void collect_preorder(Node* n, Out& out) {
    if (!n) return;
    out.push_back(n);
    collect_preorder(n->left.get(), out);
    collect_preorder(n->right.get(), out);
}

std::size_t count_leaves(const TreeNode& n) {
    if (n.is_leaf()) return 1;
    return count_leaves(*n.left) + count_leaves(*n.right);
}

std::size_t node_depth(const TreeNode& n) {
    if (n.is_leaf()) return 0;
    return 1 + std::max(node_depth(*n.left), node_depth(*n.right));
}

} // namespace

DecisionTree DecisionTree::clone() const {
    DecisionTree out;
    out.class_labels = class_labels;
    out.growth_config = growth_config;
    if (root) out.root = clone_node(*root);
    return out;
}

std::size_t DecisionTree::leaf_count() const { return root ? count_leaves(*root) : 0; }

std::size_t DecisionTree::node_count() const { return nodes_preorder().size(); }

std::size_t DecisionTree::depth() const { return root ? node_depth(*root) : 0; }

TreeNode* DecisionTree::find_node(int node_id) {
    for (TreeNode* n : nodes_preorder()) {
        if (n->node_id == node_id) return n;
    }
    return nullptr;
}

const TreeNode* DecisionTree::find_node(int node_id) const {
    for (const TreeNode* n : nodes_preorder()) {
        if (n->node_id == node_id) return n;
    }
    return nullptr;
}

std::vector<const TreeNode*> DecisionTree::nodes_preorder() const {
    std::vector<const TreeNode*> out;
    collect_preorder<const TreeNode>(root.get(), out);
    return out;
}

std::vector<TreeNode*> DecisionTree::nodes_preorder() {
    std::vector<TreeNode*> out;
    collect_preorder<TreeNode>(root.get(), out);
    return out;
}

std::vector<const TreeNode*> DecisionTree::leaves_preorder() const {
    std::vector<const TreeNode*> out;
    for (const TreeNode* n : nodes_preorder()) {
        if (n->is_leaf()) out.push_back(n);
    }
    return out;
}

std::optional<Split> best_split(std::span<const std::size_t> rows, const SurveyMatrix& m) {
    if (rows.empty()) throw std::invalid_argument("best_split: empty row set");

    ClassCounts parent;
    for (std::size_t r : rows) parent.add(m.overall_score(r));

    std::optional<Split> best;
    double best_gain = 0.0;
    for (std::size_t attr = 0; attr < m.cols(); ++attr) {
        if (attr == m.overall_index) continue;
        for (int s = m.scale_min; s < m.scale_max; ++s) {
            const double threshold = static_cast<double>(s) + 0.5;
            ClassCounts left, right;
            for (std::size_t r : rows) {
                if (static_cast<double>(m.score(r, attr)) <= threshold) {
                    left.add(m.overall_score(r));
                } else {
                    right.add(m.overall_score(r));
                }
            }
            if (left.total == 0 || right.total == 0) continue;
            const double gain = split_gain(parent, left, right);
            if (gain > best_gain) {
                best_gain = gain;
                best = Split{attr, threshold};
            }
        }
    }
    return best;
}

namespace {

struct GrowContext {
    const SurveyMatrix& m;
    const GrowthConfig& config;
    int next_id = 0;
};

std::unique_ptr<TreeNode> grow_node(GrowContext& ctx, std::vector<std::size_t> rows) {
    auto node = std::make_unique<TreeNode>();
    node->node_id = ctx.next_id++;
    for (std::size_t r : rows) node->class_counts.add(ctx.m.overall_score(r));
    node->member_rows = std::move(rows);

    if (node->member_rows.size() <= ctx.config.min_leaf_size) return node;
    const auto split = best_split(node->member_rows, ctx.m);
    if (!split) return node;

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : node->member_rows) {
        if (static_cast<double>(ctx.m.score(r, split->attribute)) <= split->threshold) {
            left_rows.push_back(r);
        } else {
            right_rows.push_back(r);
        }
    }
    if (left_rows.size() < ctx.config.min_child_size || right_rows.size() < ctx.config.min_child_size) {
        return node;
    }
    node->split = *split;
    node->left = grow_node(ctx, std::move(left_rows));
    node->right = grow_node(ctx, std::move(right_rows));
    return node;
}

} // namespace

DecisionTree grow_tree(const SurveyMatrix& m, const GrowthConfig& config,
                       std::vector<std::size_t> rows) {
    if (rows.empty()) throw std::invalid_argument("grow_tree: empty row set");
    DecisionTree t;
    t.growth_config = config;
    std::set<int> labels;
    for (std::size_t r : rows) labels.insert(m.overall_score(r));
    t.class_labels.assign(labels.begin(), labels.end());
    GrowContext ctx{m, config};
    t.root = grow_node(ctx, std::move(rows));
    return t;
}

DecisionTree grow_tree(const SurveyMatrix& m, const GrowthConfig& config) {
    std::vector<std::size_t> rows(m.rows());
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
    return grow_tree(m, config, std::move(rows));
}

int predict(const DecisionTree& t, std::span<const int> row) {
    if (!t.root) throw std::logic_error("predict: empty tree");
    const TreeNode* n = t.root.get();
    while (!n->is_leaf()) {
        const double value = static_cast<double>(row[n->split->attribute]);
        n = value <= n->split->threshold ? n->left.get() : n->right.get();
    }
    return n->majority_class();
}

namespace {

nlohmann::ordered_json counts_to_json(const ClassCounts& c) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [cls, n] : c.counts) j[std::to_string(cls)] = n;
    return j;
}

void node_to_json(const TreeNode& n, nlohmann::ordered_json& nodes) {
    nlohmann::ordered_json j;
    j["id"] = n.node_id;
    j["n"] = n.class_counts.total;
    j["counts"] = counts_to_json(n.class_counts);
    if (n.split) {
        j["split"] = {{"attribute", n.split->attribute}, {"threshold", n.split->threshold}};
        j["left"] = n.left->node_id;
        j["right"] = n.right->node_id;
    } else {
        j["split"] = nullptr;
        j["left"] = nullptr;
        j["right"] = nullptr;
    }
    nodes.push_back(std::move(j));
    if (n.left) node_to_json(*n.left, nodes);
    if (n.right) node_to_json(*n.right, nodes);
}

} // namespace

nlohmann::ordered_json tree_to_json(const DecisionTree& t) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["class_labels"] = t.class_labels;
    j["growth_config"] = {{"min_leaf_size", t.growth_config.min_leaf_size},
                          {"min_child_size", t.growth_config.min_child_size}};
    j["leaf_count"] = t.leaf_count();
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    if (t.root) node_to_json(*t.root, nodes);
    j["nodes"] = std::move(nodes);
    return j;
}

namespace {

std::unique_ptr<TreeNode> node_from_json(const nlohmann::ordered_json& nodes,
                                         const std::map<int, std::size_t>& index, int id) {
    const auto& j = nodes.at(index.at(id));
    auto n = std::make_unique<TreeNode>();
    n->node_id = id;
    for (const auto& [cls, count] : j.at("counts").items()) {
        n->class_counts.add(std::stoi(cls), count.get<std::size_t>());
    }
    if (!j.at("split").is_null()) {
        n->split = Split{j.at("split").at("attribute").get<std::size_t>(),
                         j.at("split").at("threshold").get<double>()};
        n->left = node_from_json(nodes, index, j.at("left").get<int>());
        n->right = node_from_json(nodes, index, j.at("right").get<int>());
    }
    return n;
}

} // namespace

DecisionTree tree_from_json(const nlohmann::ordered_json& j) {
    DecisionTree t;
    t.class_labels = j.at("class_labels").get<std::vector<int>>();
    t.growth_config.min_leaf_size = j.at("growth_config").at("min_leaf_size").get<std::size_t>();
    t.growth_config.min_child_size = j.at("growth_config").at("min_child_size").get<std::size_t>();
    const auto& nodes = j.at("nodes");
    if (nodes.empty()) return t;
    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes.at(i).at("id").get<int>()] = i;
    t.root = node_from_json(nodes, index, nodes.at(0).at("id").get<int>());
    return t;
}

} // namespace dtipa
