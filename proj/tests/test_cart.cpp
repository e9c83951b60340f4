#include "dtipa/cart.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <map>
#include <random>
#include <set>

using namespace dtipa;

namespace {

ClassCounts counts_of(std::initializer_list<std::pair<int, std::size_t>> parts) {
    ClassCounts c;
    for (const auto& [cls, n] : parts) c.add(cls, n);
    return c;
}

// Straight-line evaluation of the impurity formula, independent of gini().
double gini_oracle(const ClassCounts& c) {
    double acc = 0.0;
    for (const auto& [cls, n] : c.counts) {
        (void)cls;
        const double p = static_cast<double>(n) / static_cast<double>(c.total);
        acc += p * p;
    }
    return 1.0 - acc;
}

} // namespace

TEST_SUITE("cart") {

TEST_CASE("gini basics") {
    CHECK(gini(counts_of({{5, 10}})) == doctest::Approx(0.0));
    CHECK(gini(counts_of({{4, 50}, {5, 50}})) == doctest::Approx(0.5));
    // 1 - (0.2^2 + 0.3^2 + 0.5^2) = 0.62
    CHECK(gini(counts_of({{3, 2}, {4, 3}, {5, 5}})) == doctest::Approx(0.62).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(gini(ClassCounts{}), doctest::Contains("empty node"),
                         std::invalid_argument);
}

TEST_CASE("gini matches the oracle on random counts") {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> classes(1, 5);
    std::uniform_int_distribution<std::size_t> count(0, 40);
    for (int trial = 0; trial < 300; ++trial) {
        ClassCounts c;
        for (int cls = 1; cls <= classes(rng); ++cls) c.add(cls, count(rng));
        if (c.total == 0) c.add(1, 1);
        CHECK(gini(c) == doctest::Approx(gini_oracle(c)).epsilon(1e-12));
    }
}

TEST_CASE("split_gain basics") {
    const auto pure = counts_of({{5, 8}});
    CHECK(split_gain(pure, counts_of({{5, 3}}), counts_of({{5, 5}})) == doctest::Approx(0.0));

    const auto two = counts_of({{3, 1}, {4, 1}});
    CHECK(split_gain(two, counts_of({{3, 1}}), counts_of({{4, 1}})) == doctest::Approx(0.5));

    CHECK_THROWS_WITH_AS(split_gain(two, counts_of({{3, 1}}), counts_of({{3, 1}})),
                         doctest::Contains("partition"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(split_gain(two, counts_of({{3, 2}}), counts_of({{4, 1}})),
                         doctest::Contains("partition"), std::invalid_argument);
}

TEST_CASE("best_split returns nothing without a useful cut") {
    // All rows identical on the splitter attributes.
    const auto flat = testing::make_survey({"a", "b", "overall"},
                                           {{3, 3, 4}, {3, 3, 5}, {3, 3, 4}}, 2);
    CHECK(!best_split(testing::all_rows(flat), flat).has_value());

    // Pure class: every gain is zero.
    const auto pure = testing::make_survey({"a", "b", "overall"},
                                           {{1, 4, 5}, {2, 3, 5}, {4, 2, 5}}, 2);
    CHECK(!best_split(testing::all_rows(pure), pure).has_value());
}

TEST_CASE("best_split finds the separating attribute and exhausts candidates") {
    // Attribute "ticketing" at 4.5 separates the classes perfectly.
    const auto m = testing::make_survey({"noise", "ticketing", "overall"},
                                        {{3, 5, 5},
                                         {4, 5, 5},
                                         {3, 5, 5},
                                         {4, 4, 4},
                                         {3, 4, 4},
                                         {5, 3, 4}},
                                        2);
    const auto rows = testing::all_rows(m);
    const auto split = best_split(rows, m);
    REQUIRE(split.has_value());
    CHECK(split->attribute == 1);
    CHECK(split->threshold == doctest::Approx(4.5));

    // Exhaustive oracle over every candidate.
    double best_gain = 0.0;
    Split best{};
    ClassCounts parent;
    for (std::size_t r : rows) parent.add(m.overall_score(r));
    for (std::size_t attr = 0; attr < m.cols(); ++attr) {
        if (attr == m.overall_index) continue;
        for (int s = m.scale_min; s < m.scale_max; ++s) {
            const double threshold = s + 0.5;
            ClassCounts l, rgt;
            for (std::size_t r : rows) {
                (m.score(r, attr) <= threshold ? l : rgt).add(m.overall_score(r));
            }
            if (l.total == 0 || rgt.total == 0) continue;
            const double gain = split_gain(parent, l, rgt);
            if (gain > best_gain) {
                best_gain = gain;
                best = Split{attr, threshold};
            }
        }
    }
    CHECK(best == *split);
}

TEST_CASE("best_split tie-break picks lowest attribute then lowest threshold") {
    // Both columns separate the two classes identically.
    const auto m = testing::make_survey({"a", "b", "overall"},
                                        {{1, 1, 3}, {1, 1, 3}, {5, 5, 5}, {5, 5, 5}}, 2);
    const auto split = best_split(testing::all_rows(m), m);
    REQUIRE(split.has_value());
    CHECK(split->attribute == 0);
    // Thresholds 1.5 through 4.5 all give the same partition; lowest wins.
    CHECK(split->threshold == doctest::Approx(1.5));
}

TEST_CASE("grow_tree stops on a single class") {
    const auto m = testing::make_survey({"a", "overall"}, {{1, 4}, {2, 4}, {5, 4}}, 1);
    const auto t = grow_tree(m, {1, 1});
    CHECK(t.root->is_leaf());
    CHECK(t.leaf_count() == 1);
    CHECK(t.class_labels == std::vector<int>{4});
}

TEST_CASE("grow_tree separates a toy dataset into two pure leaves") {
    const auto m = testing::make_survey({"a", "b", "overall"},
                                        {{1, 3, 3}, {2, 3, 3}, {4, 3, 5}, {5, 3, 5}}, 2);
    const auto t = grow_tree(m, {1, 1});
    CHECK(t.leaf_count() == 2);
    CHECK(t.depth() == 1);
    REQUIRE(t.root->split.has_value());
    CHECK(t.root->split->attribute == 0);
    CHECK(gini(t.root->left->class_counts) == doctest::Approx(0.0));
    CHECK(gini(t.root->right->class_counts) == doctest::Approx(0.0));
    // min_leaf_size stops growth before the split when set high.
    CHECK(grow_tree(m, {4, 1}).root->is_leaf());
}

TEST_CASE("grow_tree is deterministic") {
    std::mt19937_64 rng(303);
    const auto m = testing::random_survey(rng, 60, 5);
    const auto a = grow_tree(m, {3, 1});
    const auto b = grow_tree(m, {3, 1});
    CHECK(tree_to_json(a) == tree_to_json(b));
}

TEST_CASE("node ids are preorder and member rows partition the data") {
    std::mt19937_64 rng(304);
    const auto m = testing::random_survey(rng, 80, 4);
    const auto t = grow_tree(m, {3, 1});
    const auto nodes = t.nodes_preorder();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        CHECK(nodes[i]->node_id == static_cast<int>(i));
    }
    std::set<std::size_t> seen;
    std::size_t leaf_total = 0;
    for (const TreeNode* n : nodes) {
        if (!n->is_leaf()) continue;
        leaf_total += n->member_rows.size();
        for (std::size_t r : n->member_rows) CHECK(seen.insert(r).second);
    }
    CHECK(leaf_total == m.rows());
}

TEST_CASE("every realized split has strictly positive gain and re-derives itself") {
    std::mt19937_64 rng(305);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = testing::random_survey(rng, 40, 4);
        const auto t = grow_tree(m, {2, 1});
        for (const TreeNode* n : t.nodes_preorder()) {
            if (n->is_leaf()) continue;
            const double gain =
                split_gain(n->class_counts, n->left->class_counts, n->right->class_counts);
            CHECK(gain > 0.0);
            const auto re = best_split(n->member_rows, m);
            REQUIRE(re.has_value());
            CHECK(*re == *n->split);
        }
    }
}

TEST_CASE("predict routes by the split convention") {
    const auto root_only = testing::make_survey({"a", "overall"}, {{1, 4}, {2, 4}, {3, 4}}, 1);
    const auto t0 = grow_tree(root_only, {5, 1});
    CHECK(predict(t0, std::vector<int>{5, 1}) == 4);

    const auto m = testing::make_survey({"a", "overall"},
                                        {{1, 3}, {2, 3}, {4, 5}, {5, 5}, {4, 5}, {2, 3}}, 1);
    const auto t = grow_tree(m, {1, 1});
    REQUIRE(t.root->split.has_value());
    CHECK(predict(t, std::vector<int>{5, 0}) == 5);
    CHECK(predict(t, std::vector<int>{1, 0}) == 3);
}

TEST_CASE("predict ties break toward the lower class") {
    const auto m = testing::make_survey({"a", "overall"}, {{1, 3}, {2, 5}}, 1);
    const auto t = grow_tree(m, {5, 1}); // root-only, counts {3:1, 5:1}
    CHECK(predict(t, std::vector<int>{1, 0}) == 3);
}

TEST_CASE("predict equals an explicit path walk on random data") {
    std::mt19937_64 rng(306);
    const auto m = testing::random_survey(rng, 50, 4);
    const auto t = grow_tree(m, {2, 1});
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const TreeNode* n = t.root.get();
        while (!n->is_leaf()) {
            n = m.score(r, n->split->attribute) <= n->split->threshold ? n->left.get()
                                                                       : n->right.get();
        }
        CHECK(predict(t, m.row(r)) == n->majority_class());
    }
}

TEST_CASE("tree json round-trips") {
    std::mt19937_64 rng(307);
    const auto m = testing::random_survey(rng, 40, 4);
    const auto t = grow_tree(m, {3, 1});
    const auto j = tree_to_json(t);
    const auto back = tree_from_json(j);
    CHECK(tree_to_json(back) == j);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        CHECK(predict(back, m.row(r)) == predict(t, m.row(r)));
    }
}

} // TEST_SUITE
