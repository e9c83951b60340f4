#include "dtipa/pipeline.hpp"
#include "dtipa/synth.hpp"
#include "dtipa/util.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

struct SurveyInput {
    std::string path;
    std::string bytes;
    dtipa::LoadResult loaded;
    dtipa::ValidationReport validation;
};

SurveyInput load_survey_input(const std::string& path, const dtipa::PipelineConfig& config) {
    SurveyInput input;
    input.path = path;
    input.bytes = read_file(path);
    std::istringstream stream(input.bytes);
    input.loaded = dtipa::load_survey(stream, config.overall_column, config.scale_min,
                                      config.scale_max);
    input.validation = dtipa::validate_survey(input.loaded, config.alpha_threshold,
                                              config.alpha_include_overall);
    return input;
}

void add_config_options(CLI::App* cmd, dtipa::PipelineConfig& config) {
    cmd->add_option("--overall", config.overall_column, "label of the overall-quality column")
        ->envname("DTIPA_OVERALL")
        ->capture_default_str();
    cmd->add_option("--k", config.k, "cross-validation fold count")
        ->envname("DTIPA_K")
        ->capture_default_str();
    cmd->add_option("--seed", config.seed, "fold shuffling seed")
        ->envname("DTIPA_SEED")
        ->capture_default_str();
    cmd->add_option("--min-leaf-size", config.min_leaf_size,
                    "stop splitting nodes at or below this size")
        ->envname("DTIPA_MIN_LEAF_SIZE")
        ->capture_default_str();
    cmd->add_option("--min-support", config.rule_thresholds.min_support, "rule support threshold")
        ->capture_default_str();
    cmd->add_option("--min-population", config.rule_thresholds.min_population,
                    "rule population threshold")
        ->capture_default_str();
    cmd->add_option("--min-probability", config.rule_thresholds.min_probability,
                    "rule probability threshold")
        ->capture_default_str();
    cmd->add_option("--tau", config.tau, "feasibility cutoff for Q1 attributes")
        ->envname("DTIPA_TAU")
        ->capture_default_str();
    cmd->add_option("--granularity", config.granularity, "improvement magnitude step")
        ->capture_default_str();
    cmd->add_option("--alpha-threshold", config.alpha_threshold, "reliability threshold")
        ->capture_default_str();
    cmd->add_flag("--alpha-exclude-overall",
                  [&config](std::int64_t) { config.alpha_include_overall = false; },
                  "compute cronbach alpha without the overall column");
    cmd->add_flag("--nonzero-weight-mean",
                  [&config](std::int64_t) { config.nonzero_weight_mean = true; },
                  "average only nonzero weights for the IPA origin");
    cmd->add_flag("--normalize-weights",
                  [&config](std::int64_t) { config.normalize_weights = true; },
                  "display weights normalized to sum 1");
    cmd->add_option("--target-class", [&config](const CLI::results_t& values) {
            int parsed = 0;
            const auto& text = values.at(0);
            const auto value = dtipa::parse_int(text);
            if (!value) return false;
            parsed = *value;
            config.target_class = parsed;
            return true;
        },
        "overall score the plan aims for (default: highest present)");
    cmd->add_option_function<std::string>(
        "--prune-error",
        [&config](const std::string& value) {
            if (value == "gini") {
                config.prune_error_kind = dtipa::NodeErrorKind::gini_impurity;
            } else if (value == "misclassification") {
                config.prune_error_kind = dtipa::NodeErrorKind::misclassification;
            } else {
                throw CLI::ValidationError("--prune-error must be gini or misclassification");
            }
        },
        "node error used by weakest-link pruning (experimental: misclassification)");
    cmd->add_option("--format", config.format, "output format: text, json or tsv")
        ->envname("DTIPA_FORMAT")
        ->capture_default_str();
}

std::string validation_text(const dtipa::ValidationReport& v) {
    std::string out;
    out += "rows loaded: " + std::to_string(v.rows_loaded) + '\n';
    out += "rows rejected: " + std::to_string(v.rows_rejected.size()) + '\n';
    for (const auto& r : v.rows_rejected) {
        out += "  line " + std::to_string(r.line) + ": " + r.reason + '\n';
    }
    if (!v.duplicate_rows.empty()) {
        out += "warning: " + std::to_string(v.duplicate_rows.size()) +
               " exact-duplicate row(s) kept\n";
    }
    out += "cronbach alpha: " + dtipa::format_fixed(v.cronbach_alpha, 3) + " (threshold " +
           dtipa::format_fixed(v.alpha_threshold, 2) + ")\n";
    out += std::string("reliable: ") + (v.reliable ? "true" : "false") + '\n';
    return out;
}

nlohmann::ordered_json validation_json(const dtipa::ValidationReport& v) {
    nlohmann::ordered_json j;
    j["rows_loaded"] = v.rows_loaded;
    nlohmann::ordered_json rejected = nlohmann::ordered_json::array();
    for (const auto& r : v.rows_rejected) rejected.push_back({{"line", r.line}, {"reason", r.reason}});
    j["rows_rejected"] = std::move(rejected);
    j["duplicate_rows"] = v.duplicate_rows;
    j["cronbach_alpha"] = v.cronbach_alpha;
    j["alpha_threshold"] = v.alpha_threshold;
    j["reliable"] = v.reliable;
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DT-IPA service-quality improvement planner"};
    app.require_subcommand(1);

    dtipa::PipelineConfig config;
    std::string survey_path, judgments_path, out_path, tree_out, curve_out, ahp_out;

    auto* validate_cmd = app.add_subcommand("validate", "load a survey CSV and report reliability");
    validate_cmd->add_option("-i,--input", survey_path, "survey CSV")->required();
    add_config_options(validate_cmd, config);
    validate_cmd->add_option("-o,--out", out_path, "output path (default stdout)");
    validate_cmd->callback([&] {
        config.validate();
        const auto input = load_survey_input(survey_path, config);
        if (config.format == "json") {
            write_output(out_path, validation_json(input.validation).dump(2) + "\n");
        } else {
            write_output(out_path, validation_text(input.validation));
        }
    });

    auto* fit_cmd = app.add_subcommand("fit", "grow, prune and select the optimal tree");
    fit_cmd->add_option("-i,--input", survey_path, "survey CSV")->required();
    add_config_options(fit_cmd, config);
    fit_cmd->add_option("--tree-out", tree_out, "optimal tree JSON path")
        ->capture_default_str()
        ->default_val("tree.json");
    fit_cmd->add_option("--curve-out", curve_out, "prune curve TSV path")
        ->capture_default_str()
        ->default_val("prune_curve.tsv");
    fit_cmd->callback([&] {
        config.validate();
        const auto input = load_survey_input(survey_path, config);
        const auto fit = dtipa::fit_survey(input.loaded.matrix, config);
        write_output(tree_out, dtipa::tree_to_json(fit.optimal).dump(2) + "\n");
        write_output(curve_out, dtipa::prune_curve_tsv(dtipa::curve_rows(fit, input.loaded.matrix)));
        std::cout << "saturated leaves: " << fit.saturated.leaf_count()
                  << ", optimal leaves: " << fit.optimal.leaf_count() << '\n'
                  << "tree written to " << tree_out << ", curve to " << curve_out << '\n';
    });

    auto* curve_cmd = app.add_subcommand("prune-curve", "emit the size-vs-error curve as TSV");
    curve_cmd->add_option("-i,--input", survey_path, "survey CSV")->required();
    add_config_options(curve_cmd, config);
    curve_cmd->add_option("-o,--out", out_path, "output path (default stdout)");
    curve_cmd->callback([&] {
        config.validate();
        const auto input = load_survey_input(survey_path, config);
        const auto fit = dtipa::fit_survey(input.loaded.matrix, config);
        write_output(out_path, dtipa::prune_curve_tsv(dtipa::curve_rows(fit, input.loaded.matrix)));
    });

    auto* ipa_cmd = app.add_subcommand("ipa", "attribute means, weights and quadrants");
    ipa_cmd->add_option("-i,--input", survey_path, "survey CSV")->required();
    add_config_options(ipa_cmd, config);
    ipa_cmd->add_option("-o,--out", out_path, "output path (default stdout)");
    ipa_cmd->callback([&] {
        config.validate();
        const auto input = load_survey_input(survey_path, config);
        const auto fit = dtipa::fit_survey(input.loaded.matrix, config);
        const auto means = dtipa::attribute_means(input.loaded.matrix);
        const auto weights = dtipa::attribute_weights(fit.optimal, input.loaded.matrix.cols(),
                                                      input.loaded.matrix.overall_index);
        const auto ipa = dtipa::ipa_classify(input.loaded.matrix, means, weights,
                                             config.nonzero_weight_mean);
        write_output(out_path, dtipa::ipa_tsv(ipa, config.normalize_weights));
    });

    auto* rules_cmd = app.add_subcommand("rules", "if-then rules of the optimal tree");
    rules_cmd->add_option("-i,--input", survey_path, "survey CSV")->required();
    add_config_options(rules_cmd, config);
    rules_cmd->add_option("-o,--out", out_path, "output path (default stdout)");
    rules_cmd->callback([&] {
        config.validate();
        const auto input = load_survey_input(survey_path, config);
        const auto fit = dtipa::fit_survey(input.loaded.matrix, config);
        const auto rules = dtipa::extract_rules(fit.optimal, input.loaded.matrix,
                                                config.rule_thresholds);
        const auto& names = input.loaded.matrix.attribute_names;
        if (config.format == "tsv") {
            write_output(out_path, dtipa::rules_tsv(rules, names));
        } else {
            write_output(out_path, dtipa::rules_text(rules, names));
        }
    });

    auto* ahp_cmd = app.add_subcommand("ahp", "feasibility vector from pairwise judgments");
    ahp_cmd->add_option("-j,--judgments", judgments_path, "judgments CSV (i,j,value)")->required();
    ahp_cmd->add_option("-o,--out", out_path, "output path (default stdout)");
    ahp_cmd->callback([&] {
        const auto judgments = dtipa::load_judgments_file(judgments_path);
        const auto feasibility = dtipa::feasibility_vector(judgments);
        std::string out = "lambda_max\t" + dtipa::format_fixed(feasibility.lambda_max, 6) + '\n';
        out += "consistency_index\t" + dtipa::format_fixed(feasibility.ci, 6) + '\n';
        out += "consistency_ratio\t" + dtipa::format_fixed(feasibility.cr, 6) + '\n';
        for (std::size_t i = 0; i < feasibility.labels.size(); ++i) {
            out += feasibility.labels[i] + '\t' + dtipa::format_fixed(feasibility.values[i], 6) + '\n';
        }
        write_output(out_path, out);
    });

    auto* plan_cmd = app.add_subcommand("plan", "adjusted improvement priorities and magnitudes");
    plan_cmd->add_option("-i,--input", survey_path, "survey CSV")->required();
    plan_cmd->add_option("-j,--judgments", judgments_path, "judgments CSV (i,j,value)")->required();
    add_config_options(plan_cmd, config);
    plan_cmd->add_option("-o,--out", out_path, "output path (default stdout)");
    plan_cmd->callback([&] {
        config.validate();
        const auto input = load_survey_input(survey_path, config);
        const std::string judgment_bytes = read_file(judgments_path);
        std::istringstream judgment_stream(judgment_bytes);
        const auto judgments = dtipa::load_judgments(judgment_stream);
        const auto report = dtipa::run_plan(input.loaded.matrix, input.validation, judgments,
                                            config, dtipa::fnv1a64_hex(input.bytes),
                                            dtipa::fnv1a64_hex(judgment_bytes));
        if (config.format == "json") {
            write_output(out_path, report.to_json().dump(2) + "\n");
        } else if (config.format == "tsv") {
            write_output(out_path, dtipa::plan_tsv(report.plan));
        } else {
            write_output(out_path, dtipa::plan_text(report.plan));
        }
    });

    auto* report_cmd = app.add_subcommand("report", "full pipeline report");
    report_cmd->add_option("-i,--input", survey_path, "survey CSV")->required();
    report_cmd->add_option("-j,--judgments", judgments_path, "judgments CSV (i,j,value)")->required();
    add_config_options(report_cmd, config);
    report_cmd->add_option("-o,--out", out_path, "output path (default stdout)");
    report_cmd->callback([&] {
        config.validate();
        const auto input = load_survey_input(survey_path, config);
        const std::string judgment_bytes = read_file(judgments_path);
        std::istringstream judgment_stream(judgment_bytes);
        const auto judgments = dtipa::load_judgments(judgment_stream);
        const auto report = dtipa::run_plan(input.loaded.matrix, input.validation, judgments,
                                            config, dtipa::fnv1a64_hex(input.bytes),
                                            dtipa::fnv1a64_hex(judgment_bytes));
        if (config.format == "json") {
            write_output(out_path, report.to_json().dump(2) + "\n");
        } else {
            write_output(out_path, report.to_text());
        }
    });

    auto* synth_cmd = app.add_subcommand("synth", "write the bundled synthetic fixture");
    synth_cmd->add_option("-o,--out", out_path, "survey CSV path (default stdout)");
    synth_cmd->add_option("--ahp-out", ahp_out, "also write matching judgments CSV here");
    synth_cmd->callback([&] {
        write_output(out_path, dtipa::synth_survey_csv());
        if (!ahp_out.empty()) write_output(ahp_out, dtipa::synth_judgments_csv());
    });

    // Subcommand callbacks run inside parse(); domain failures surface here.
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "dtipa: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
