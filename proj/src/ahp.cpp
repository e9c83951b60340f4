#include "dtipa/ahp.hpp"

#include "dtipa/util.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dtipa {

namespace {
constexpr double kScaleMin = 1.0 / 9.0;
constexpr double kScaleMax = 9.0;
constexpr double kReciprocityTolerance = 1e-9;
} // namespace

JudgmentMatrix JudgmentMatrix::from_upper_triangle(std::vector<std::string> labels,
                                                   const std::vector<PairwiseEntry>& entries) {
    const std::size_t q = labels.size();
    if (q < 2) throw std::invalid_argument("judgment matrix requires at least 2 attributes");

    JudgmentMatrix m;
    m.labels = std::move(labels);
    m.values.assign(q, std::vector<double>(q, 0.0));
    for (std::size_t i = 0; i < q; ++i) m.values[i][i] = 1.0;

    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : entries) {
        if (e.i >= q || e.j >= q || e.i >= e.j) {
            throw std::invalid_argument("judgment entry outside the strict upper triangle");
        }
        if (!seen.insert({e.i, e.j}).second) {
            throw std::invalid_argument("duplicate judgment for pair (" + m.labels[e.i] + ", " +
                                        m.labels[e.j] + ")");
        }
        if (!(e.value > 0.0)) throw std::invalid_argument("judgment values must be positive");
        m.values[e.i][e.j] = e.value;
        m.values[e.j][e.i] = 1.0 / e.value;
    }
    if (seen.size() != q * (q - 1) / 2) {
        throw std::invalid_argument("judgment matrix is missing pairwise comparisons");
    }
    m.validate();
    return m;
}

void JudgmentMatrix::validate() const {
    const std::size_t q = size();
    if (q < 2) throw std::invalid_argument("judgment matrix requires at least 2 attributes");
    if (values.size() != q) throw std::invalid_argument("judgment matrix shape mismatch");
    for (std::size_t i = 0; i < q; ++i) {
        if (values[i].size() != q) throw std::invalid_argument("judgment matrix shape mismatch");
        if (values[i][i] != 1.0) throw std::invalid_argument("judgment matrix diagonal must be 1");
        for (std::size_t j = 0; j < q; ++j) {
            const double v = values[i][j];
            if (!(v > 0.0)) throw std::invalid_argument("judgment values must be positive");
            if (v < kScaleMin - kReciprocityTolerance || v > kScaleMax + kReciprocityTolerance) {
                throw std::invalid_argument("judgment value " + format_fixed(v, 6) +
                                            " outside the 1-9 scale range [1/9, 9]");
            }
            if (std::abs(values[j][i] - 1.0 / v) > kReciprocityTolerance) {
                throw std::invalid_argument("judgment matrix is not reciprocal");
            }
        }
    }
}

PowerIterationResult principal_eigenvector(const JudgmentMatrix& j) {
    j.validate();
    const std::size_t q = j.size();
    constexpr std::size_t kMaxIterations = 1000;
    constexpr double kTolerance = 1e-10;

    std::vector<double> v(q, 1.0 / static_cast<double>(q)), next(q);
    for (std::size_t iter = 1; iter <= kMaxIterations; ++iter) {
        double sum = 0.0;
        for (std::size_t r = 0; r < q; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < q; ++c) acc += j.values[r][c] * v[c];
            next[r] = acc;
            sum += acc;
        }
        double diff = 0.0;
        for (std::size_t r = 0; r < q; ++r) {
            next[r] /= sum;
            diff = std::max(diff, std::abs(next[r] - v[r]));
        }
        v = next;
        if (diff < kTolerance) {
            double lambda = 0.0;
            for (std::size_t r = 0; r < q; ++r) {
                double acc = 0.0;
                for (std::size_t c = 0; c < q; ++c) acc += j.values[r][c] * v[c];
                lambda += acc / v[r];
            }
            lambda /= static_cast<double>(q);
            return {lambda, v, iter};
        }
    }
    throw std::runtime_error("power iteration did not converge after 1000 iterations");
}

ConsistencyResult consistency_ratio(const JudgmentMatrix& j, double lambda_max) {
    const std::size_t q = j.size();
    ConsistencyResult out;
    out.ci = q < 2 ? 0.0 : (lambda_max - static_cast<double>(q)) / static_cast<double>(q - 1);
    out.cr = q <= 2 ? 0.0 : out.ci / random_index(q);
    return out;
}

double random_index(std::size_t q) {
    static constexpr std::array<double, 10> kTable{0.0,  0.0,  0.0,  0.58, 0.90,
                                                   1.12, 1.24, 1.32, 1.41, 1.45};
    if (q < 1 || q > 9) throw std::out_of_range("random index defined for 1 <= q <= 9");
    return kTable[q];
}

std::optional<double> FeasibilityVector::of(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return values[i];
    }
    return std::nullopt;
}

FeasibilityVector feasibility_vector(const JudgmentMatrix& j) {
    const PowerIterationResult eig = principal_eigenvector(j);
    const ConsistencyResult consistency = consistency_ratio(j, eig.lambda_max);
    if (consistency.cr >= 0.1) {
        throw std::runtime_error("inconsistent judgments, revise matrix (CR = " +
                                 format_fixed(consistency.cr, 4) + " >= 0.1)");
    }
    FeasibilityVector out;
    out.labels = j.labels;
    out.values = eig.eigenvector;
    out.lambda_max = eig.lambda_max;
    out.ci = consistency.ci;
    out.cr = consistency.cr;
    return out;
}

double parse_ratio(std::string_view text) {
    text = trim(text);
    const std::size_t slash = text.find('/');
    if (slash == std::string_view::npos) {
        const auto value = parse_double(text);
        if (!value) throw std::invalid_argument("cannot parse judgment value '" + std::string(text) + "'");
        return *value;
    }
    const auto numerator = parse_double(text.substr(0, slash));
    const auto denominator = parse_double(text.substr(slash + 1));
    if (!numerator || !denominator || *denominator == 0.0) {
        throw std::invalid_argument("cannot parse judgment value '" + std::string(text) + "'");
    }
    return *numerator / *denominator;
}

JudgmentMatrix load_judgments(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("judgments CSV: missing header row");
    const auto header = split_csv_line(line);
    if (header.size() != 3 || header[0] != "i" || header[1] != "j" || header[2] != "value") {
        throw std::runtime_error("judgments CSV: header must be 'i,j,value'");
    }

    std::vector<std::string> labels;
    std::map<std::string, std::size_t> index;
    const auto intern = [&](const std::string& label) {
        const auto it = index.find(label);
        if (it != index.end()) return it->second;
        const std::size_t id = labels.size();
        labels.push_back(label);
        index.emplace(label, id);
        return id;
    };

    std::vector<PairwiseEntry> entries;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) {
            throw std::runtime_error("judgments CSV line " + std::to_string(line_no) +
                                     ": expected 3 fields");
        }
        const std::size_t a = intern(fields[0]);
        const std::size_t b = intern(fields[1]);
        if (a == b) {
            throw std::runtime_error("judgments CSV line " + std::to_string(line_no) +
                                     ": self-comparison '" + fields[0] + "'");
        }
        double value = parse_ratio(fields[2]);
        // Normalize orientation so the stored pair sits in the upper triangle
        // of the label order.
        if (a < b) {
            entries.push_back({a, b, value});
        } else {
            entries.push_back({b, a, 1.0 / value});
        }
    }
    return JudgmentMatrix::from_upper_triangle(std::move(labels), entries);
}

JudgmentMatrix load_judgments_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open judgments file: " + path);
    return load_judgments(in);
}

} // namespace dtipa
