#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dtipa {

// N x M table of integer Likert scores. Rows are respondents, columns are
// service-quality attributes; one column is the designated overall-quality
// score used as the class label downstream.
struct SurveyMatrix {
    std::vector<std::string> attribute_names;
    std::size_t overall_index = 0;
    int scale_min = 1;
    int scale_max = 5;
    std::vector<int> cells; // row-major, rows() * cols()

    std::size_t cols() const { return attribute_names.size(); }
    std::size_t rows() const { return cols() == 0 ? 0 : cells.size() / cols(); }

    std::span<const int> row(std::size_t r) const {
        return std::span<const int>(cells).subspan(r * cols(), cols());
    }
    int score(std::size_t r, std::size_t c) const { return cells[r * cols() + c]; }
    int& score(std::size_t r, std::size_t c) { return cells[r * cols() + c]; }
    int overall_score(std::size_t r) const { return score(r, overall_index); }

    std::optional<std::size_t> attribute_index(std::string_view name) const;

    bool operator==(const SurveyMatrix&) const = default;
};

struct RejectedRow {
    std::size_t line; // 1-based line number in the source CSV
    std::string reason;
};

struct LoadResult {
    SurveyMatrix matrix;
    std::vector<RejectedRow> rejected;
    std::vector<std::size_t> duplicate_rows; // kept-row indices equal to an earlier kept row
};

// Parses a header+rows CSV of integer scores. Rows with gaps, non-integer
// cells or out-of-range scores are rejected (recorded, not fatal). Throws on
// a missing header, an unknown overall column, or zero valid rows.
LoadResult load_survey(std::istream& source, const std::string& overall_column,
                       int scale_min = 1, int scale_max = 5);
LoadResult load_survey_file(const std::string& path, const std::string& overall_column,
                            int scale_min = 1, int scale_max = 5);

// Canonical CSV serialization (header + one row per respondent).
void write_survey_csv(std::ostream& out, const SurveyMatrix& m);
std::string survey_to_csv(const SurveyMatrix& m);

// alpha = (M/(M-1)) * (1 - sum(col variance) / variance(row totals)), with
// unbiased (N-1) variances. Throws when all respondents have identical totals.
double cronbach_alpha(const SurveyMatrix& m, bool include_overall = true);

// Arithmetic mean per column; the overall column is included (callers skip it
// via overall_index where it does not apply).
std::vector<double> attribute_means(const SurveyMatrix& m);

struct ValidationReport {
    std::size_t rows_loaded = 0;
    std::vector<RejectedRow> rows_rejected;
    std::vector<std::size_t> duplicate_rows;
    double cronbach_alpha = 0.0;
    double alpha_threshold = 0.7;
    bool reliable = false;
};

ValidationReport validate_survey(const LoadResult& loaded, double alpha_threshold = 0.7,
                                 bool alpha_include_overall = true);

} // namespace dtipa
