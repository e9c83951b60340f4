#include "dtipa/analysis.hpp"

#include <stdexcept>

namespace dtipa {

double WeightVector::total() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (i != overall_index) sum += weights[i];
    }
    return sum;
}

WeightVector attribute_weights(const DecisionTree& t, std::size_t attribute_count,
                               std::size_t overall_index) {
    WeightVector w;
    w.weights.assign(attribute_count, 0.0);
    w.overall_index = overall_index;
    if (!t.root) return w;

    const double root_total = static_cast<double>(t.root->class_counts.total);
    for (const TreeNode* n : t.nodes_preorder()) {
        if (n->is_leaf()) continue;
        const double gain = split_gain(n->class_counts, n->left->class_counts,
                                       n->right->class_counts);
        const double fraction = static_cast<double>(n->class_counts.total) / root_total;
        w.weights[n->split->attribute] += fraction * gain;
    }
    return w;
}

std::string_view quadrant_code(Quadrant q) {
    switch (q) {
        case Quadrant::priority_improve: return "Q1";
        case Quadrant::keep_up: return "Q2";
        case Quadrant::low_priority: return "Q3";
        case Quadrant::possible_overkill: return "Q4";
    }
    return "?";
}

std::string_view quadrant_name(Quadrant q) {
    switch (q) {
        case Quadrant::priority_improve: return "priority-improve";
        case Quadrant::keep_up: return "keep-up";
        case Quadrant::low_priority: return "low-priority";
        case Quadrant::possible_overkill: return "possible-overkill";
    }
    return "?";
}

const IpaEntry* IpaResult::find(std::string_view name) const {
    for (const auto& e : entries) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

const IpaEntry* IpaResult::find(std::size_t attribute) const {
    for (const auto& e : entries) {
        if (e.attribute == attribute) return &e;
    }
    return nullptr;
}

IpaResult ipa_classify(const SurveyMatrix& m, const std::vector<double>& means,
                       const WeightVector& w, bool nonzero_weight_mean) {
    if (means.size() != m.cols() || w.weights.size() != m.cols()) {
        throw std::invalid_argument("ipa_classify: means/weights must cover every survey column");
    }
    std::vector<std::size_t> attrs;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        if (c != m.overall_index) attrs.push_back(c);
    }
    if (attrs.size() < 2) throw std::invalid_argument("ipa_classify: fewer than 2 attributes");

    double grand_mean = 0.0;
    for (std::size_t a : attrs) grand_mean += means[a];
    grand_mean /= static_cast<double>(attrs.size());

    double weight_sum = 0.0;
    std::size_t weight_n = 0;
    for (std::size_t a : attrs) {
        if (nonzero_weight_mean && w.weights[a] == 0.0) continue;
        weight_sum += w.weights[a];
        ++weight_n;
    }
    const double mean_weight = weight_n == 0 ? 0.0 : weight_sum / static_cast<double>(weight_n);

    IpaResult result;
    result.grand_mean = grand_mean;
    result.mean_weight = mean_weight;
    for (std::size_t a : attrs) {
        IpaEntry e;
        e.attribute = a;
        e.name = m.attribute_names[a];
        e.mean = means[a];
        e.weight = w.weights[a];
        const bool high_weight = e.weight > mean_weight;
        const bool low_score = e.mean < grand_mean;
        if (high_weight) {
            e.quadrant = low_score ? Quadrant::priority_improve : Quadrant::keep_up;
        } else {
            e.quadrant = low_score ? Quadrant::low_priority : Quadrant::possible_overkill;
        }
        e.initial_priority = static_cast<int>(e.quadrant);
        result.entries.push_back(std::move(e));
    }
    return result;
}

} // namespace dtipa
