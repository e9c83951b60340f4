#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dtipa {

struct PairwiseEntry {
    std::size_t i = 0; // row label index
    std::size_t j = 0; // column label index, i < j
    double value = 1.0;
};

// Positive reciprocal matrix of pairwise improvement-feasibility judgments on
// the 1-9 scale. Only the strict upper triangle is accepted as input; the
// diagonal and lower triangle are derived, so reciprocity holds by
// construction.
struct JudgmentMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> values;

    std::size_t size() const { return labels.size(); }

    static JudgmentMatrix from_upper_triangle(std::vector<std::string> labels,
                                              const std::vector<PairwiseEntry>& entries);
    void validate() const;
};

struct PowerIterationResult {
    double lambda_max = 0.0;
    std::vector<double> eigenvector; // normalized to sum 1
    std::size_t iterations = 0;
};

// Power iteration with sum-1 normalization; stops when successive iterates
// differ by < 1e-10 in max norm, throws after 1000 iterations. lambda_max is
// the mean of componentwise (Jv)/v.
PowerIterationResult principal_eigenvector(const JudgmentMatrix& j);

struct ConsistencyResult {
    double ci = 0.0;
    double cr = 0.0;
};

// CI = (lambda_max - q) / (q - 1); CR = CI / RI(q). CR is 0 by definition for
// q <= 2.
ConsistencyResult consistency_ratio(const JudgmentMatrix& j, double lambda_max);

// Saaty's random index for q = 1..9.
double random_index(std::size_t q);

struct FeasibilityVector {
    std::vector<std::string> labels;
    std::vector<double> values; // strictly positive, sums to 1
    double lambda_max = 0.0;
    double ci = 0.0;
    double cr = 0.0;

    std::optional<double> of(std::string_view label) const;
};

// Normalized principal eigenvector with the consistency check applied;
// throws "inconsistent judgments" when CR >= 0.1.
FeasibilityVector feasibility_vector(const JudgmentMatrix& j);

// CSV with header "i,j,value": one upper-triangle judgment per line, keyed by
// attribute label. Values are decimals or fractions such as "1/3".
JudgmentMatrix load_judgments(std::istream& in);
JudgmentMatrix load_judgments_file(const std::string& path);

// Parses "3", "0.5" or "1/3".
double parse_ratio(std::string_view text);

} // namespace dtipa
