#include "dtipa/survey.hpp"

#include "dtipa/util.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dtipa {

std::optional<std::size_t> SurveyMatrix::attribute_index(std::string_view name) const {
    for (std::size_t i = 0; i < attribute_names.size(); ++i) {
        if (attribute_names[i] == name) return i;
    }
    return std::nullopt;
}

LoadResult load_survey(std::istream& source, const std::string& overall_column,
                       int scale_min, int scale_max) {
    if (scale_min >= scale_max) throw std::invalid_argument("survey: scale_min must be below scale_max");

    std::string line;
    if (!std::getline(source, line) || trim(line).empty()) {
        throw std::runtime_error("survey CSV: missing header row");
    }

    LoadResult result;
    SurveyMatrix& m = result.matrix;
    m.scale_min = scale_min;
    m.scale_max = scale_max;
    m.attribute_names = split_csv_line(line);
    for (const auto& name : m.attribute_names) {
        if (name.empty()) throw std::runtime_error("survey CSV: empty attribute label in header");
    }
    for (std::size_t i = 0; i < m.attribute_names.size(); ++i) {
        for (std::size_t j = i + 1; j < m.attribute_names.size(); ++j) {
            if (m.attribute_names[i] == m.attribute_names[j]) {
                throw std::runtime_error("survey CSV: duplicate attribute label '" + m.attribute_names[i] + "'");
            }
        }
    }
    if (m.cols() < 2) throw std::runtime_error("survey CSV: need at least 2 columns");

    const auto overall = m.attribute_index(overall_column);
    if (!overall) throw std::runtime_error("survey CSV: overall column '" + overall_column + "' not found in header");
    m.overall_index = *overall;

    const std::size_t n_cols = m.cols();
    std::map<std::vector<int>, std::size_t> seen;
    std::size_t line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != n_cols) {
            result.rejected.push_back({line_no, "expected " + std::to_string(n_cols) + " fields, got " +
                                                    std::to_string(fields.size())});
            continue;
        }
        std::vector<int> row(n_cols);
        std::string reason;
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (fields[c].empty()) {
                reason = "column '" + m.attribute_names[c] + "': missing value";
                break;
            }
            const auto value = parse_int(fields[c]);
            if (!value) {
                reason = "column '" + m.attribute_names[c] + "': not an integer: '" + fields[c] + "'";
                break;
            }
            if (*value < scale_min || *value > scale_max) {
                reason = "column '" + m.attribute_names[c] + "': score " + std::to_string(*value) +
                         " out of range [" + std::to_string(scale_min) + ", " + std::to_string(scale_max) + "]";
                break;
            }
            row[c] = *value;
        }
        if (!reason.empty()) {
            result.rejected.push_back({line_no, reason});
            continue;
        }
        const std::size_t kept_index = m.rows();
        auto [it, inserted] = seen.emplace(row, kept_index);
        if (!inserted) result.duplicate_rows.push_back(kept_index);
        m.cells.insert(m.cells.end(), row.begin(), row.end());
    }

    if (m.rows() == 0) throw std::runtime_error("survey CSV: no valid rows");
    return result;
}

LoadResult load_survey_file(const std::string& path, const std::string& overall_column,
                            int scale_min, int scale_max) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open survey file: " + path);
    return load_survey(in, overall_column, scale_min, scale_max);
}

void write_survey_csv(std::ostream& out, const SurveyMatrix& m) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
        if (c > 0) out << ',';
        out << m.attribute_names[c];
    }
    out << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c > 0) out << ',';
            out << m.score(r, c);
        }
        out << '\n';
    }
}

std::string survey_to_csv(const SurveyMatrix& m) {
    std::ostringstream out;
    write_survey_csv(out, m);
    return out.str();
}

double cronbach_alpha(const SurveyMatrix& m, bool include_overall) {
    const std::size_t n = m.rows();
    if (n < 2) throw std::runtime_error("cronbach alpha requires at least 2 respondents");

    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        if (!include_overall && c == m.overall_index) continue;
        cols.push_back(c);
    }
    const std::size_t k = cols.size();
    if (k < 2) throw std::runtime_error("cronbach alpha requires at least 2 attribute columns");

    const auto sample_variance = [n](const std::vector<double>& xs) {
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        return ss / static_cast<double>(n - 1);
    };

    double item_variance_sum = 0.0;
    std::vector<double> column(n), totals(n, 0.0);
    for (std::size_t c : cols) {
        for (std::size_t r = 0; r < n; ++r) {
            column[r] = static_cast<double>(m.score(r, c));
            totals[r] += column[r];
        }
        item_variance_sum += sample_variance(column);
    }
    const double total_variance = sample_variance(totals);
    if (total_variance == 0.0) {
        throw std::runtime_error("degenerate survey (all respondents identical totals)");
    }
    const double kd = static_cast<double>(k);
    return (kd / (kd - 1.0)) * (1.0 - item_variance_sum / total_variance);
}

std::vector<double> attribute_means(const SurveyMatrix& m) {
    const std::size_t n = m.rows();
    std::vector<double> means(m.cols(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            means[c] += static_cast<double>(m.score(r, c));
        }
    }
    for (auto& v : means) v /= static_cast<double>(n);
    return means;
}

ValidationReport validate_survey(const LoadResult& loaded, double alpha_threshold,
                                 bool alpha_include_overall) {
    ValidationReport report;
    report.rows_loaded = loaded.matrix.rows();
    report.rows_rejected = loaded.rejected;
    report.duplicate_rows = loaded.duplicate_rows;
    report.alpha_threshold = alpha_threshold;
    report.cronbach_alpha = cronbach_alpha(loaded.matrix, alpha_include_overall);
    report.reliable = report.cronbach_alpha >= alpha_threshold;
    return report;
}

} // namespace dtipa
