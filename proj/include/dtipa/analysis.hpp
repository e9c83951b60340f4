#pragma once

#include "dtipa/cart.hpp"
#include "dtipa/survey.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dtipa {

// Tree-derived importance per attribute: the sample-fraction-weighted Gini
// decrease summed over every node split on that attribute. Attributes never
// used as splitters have weight exactly 0; the overall column is excluded.
struct WeightVector {
    std::vector<double> weights; // indexed by survey column
    std::size_t overall_index = 0;

    double total() const;
};

WeightVector attribute_weights(const DecisionTree& t, std::size_t attribute_count,
                               std::size_t overall_index);

enum class Quadrant {
    priority_improve = 1,  // high weight, low score
    keep_up = 2,           // high weight, high score
    low_priority = 3,      // low weight, low score
    possible_overkill = 4, // low weight, high score
};

std::string_view quadrant_code(Quadrant q); // "Q1".."Q4"
std::string_view quadrant_name(Quadrant q);

struct IpaEntry {
    std::size_t attribute = 0;
    std::string name;
    double mean = 0.0;
    double weight = 0.0;
    Quadrant quadrant = Quadrant::low_priority;
    int initial_priority = 3;
};

struct IpaResult {
    std::vector<IpaEntry> entries; // non-overall attributes in column order
    double grand_mean = 0.0;
    double mean_weight = 0.0;

    const IpaEntry* find(std::string_view name) const;
    const IpaEntry* find(std::size_t attribute) const;
};

// Quadrant rule: high weight requires w > mean weight, low score requires
// x < grand mean; equality falls to the not-high / not-low side. With
// nonzero_weight_mean, the weight origin averages only attributes that were
// actually split on.
IpaResult ipa_classify(const SurveyMatrix& m, const std::vector<double>& means,
                       const WeightVector& w, bool nonzero_weight_mean = false);

} // namespace dtipa
