#include "metricfuse/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "metricfuse/calibration.hpp"
#include "metricfuse/correlation.hpp"
#include "metricfuse/io.hpp"
#include "metricfuse/scoring.hpp"

namespace metricfuse {

namespace {

using nlohmann::json;

int log_level() {
    const char* v = std::getenv("METRICFUSE_LOG");
    if (v == nullptr) return 0;
    const std::string s(v);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return 0;
}

struct CommonFlags {
    std::string train;
    std::string data;
    std::string metrics;
    std::string config;
    std::string scores;
    std::string out;
    std::string mode = "ref";
    std::string group_by = "lang";
    int steps = 100;
    int init = 5;
    std::uint64_t seed = 0;
    double zero_threshold = 1e-3;
    bool hybrid = false;
    bool per_lang = false;
    bool flip_gold = false;
    bool lenient = false;
    bool display_normalized = false;
};

std::string fmt4(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << v;
    return s.str();
}

std::string fmt6(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(6) << v;
    return s.str();
}

std::string fmt_clip(double lo, double hi) {
    std::ostringstream s;
    s << "[" << lo << "," << hi << "]";
    return s.str();
}

std::vector<MetricSpec> reference_free_subset(const std::vector<MetricSpec>& specs) {
    std::vector<MetricSpec> out;
    for (const auto& s : specs) {
        if (!s.needs_reference) out.push_back(s);
    }
    return out;
}

int report_validation_issues(const std::vector<ValidationIssue>& issues,
                             const std::string& what, std::ostream& err) {
    err << "error: " << what << " failed validation with " << issues.size() << " issue(s):\n";
    for (const auto& issue : issues) {
        err << "  record " << issue.record_index + 1 << " (" << issue.key.str()
            << "): " << issue.message << "\n";
    }
    return 1;
}

json bo_provenance(const BoConfig& bo) {
    return json{{"init_points", bo.init_points},
                {"steps", bo.steps},
                {"acquisition", "ucb"},
                {"kappa", bo.kappa},
                {"candidate_count", bo.effective_candidate_count()},
                {"refinement", "coordinate golden-section, 20 iterations, radius 0.25"},
                {"stopping", "fixed budget"}};
}

json kernel_provenance() {
    return json{{"family", "matern"},
                {"nu", 2.5},
                {"length_scale_rule", "0.25 * sqrt(dimension)"},
                {"signal_variance_rule", "observation variance, floored at 1e-4"},
                {"noise_variance", 1e-6},
                {"jitter", "1e-10, escalated x10 up to 1e-4 on factorization failure"}};
}

// Runs one calibration (global or per-language) and returns the composite
// pieces plus the objective bookkeeping for provenance.
struct CalibrationPieces {
    std::vector<double> weights;
    std::map<std::string, std::vector<double>> per_lang;
    double config_objective;
    double best_objective;
    json per_lang_objectives;  // null unless per-language
    std::vector<std::string> warnings;
};

CalibrationPieces run_calibration(const CalibrationJob& job) {
    CalibrationPieces pieces;
    if (job.per_language) {
        PerLanguageResult res = calibrate_per_language(job);
        pieces.weights = res.config.weights;
        pieces.per_lang = res.config.per_lang;
        pieces.config_objective = res.global.config_objective;
        pieces.best_objective = res.global.best_objective;
        pieces.warnings = res.warnings;
        pieces.per_lang_objectives = json::object();
        for (const auto& [pair, r] : res.per_pair) {
            pieces.per_lang_objectives[pair] = r.config_objective;
        }
    } else {
        CalibrationResult res = calibrate_global(job);
        pieces.weights = res.config.weights;
        pieces.config_objective = res.config_objective;
        pieces.best_objective = res.best_objective;
    }
    return pieces;
}

int cmd_calibrate(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
    const bool verbose = log_level() >= 1;
    const std::vector<MetricSpec> declared = read_metric_specs(flags.metrics);
    const CalibrationMode mode = flags.mode == "qe" ? CalibrationMode::ReferenceFree
                                                    : CalibrationMode::ReferenceBased;

    std::vector<MetricSpec> primary_specs =
        mode == CalibrationMode::ReferenceFree ? reference_free_subset(declared) : declared;
    if (primary_specs.empty()) {
        throw DataError("no reference-free metrics declared; cannot calibrate in qe mode");
    }
    if (flags.hybrid && flags.mode == "qe") {
        throw DataError("--hybrid requires --mode ref (the fallback is already reference-free)");
    }
    std::vector<MetricSpec> fallback_specs;
    if (flags.hybrid) {
        fallback_specs = reference_free_subset(declared);
        if (fallback_specs.empty()) {
            throw DataError("--hybrid needs at least one reference-free metric declared");
        }
    }

    const std::vector<SegmentRecord> records = read_dataset(flags.train, flags.flip_gold);

    std::vector<SegmentRecord> primary_records;
    if (flags.hybrid) {
        for (const auto& rec : records) {
            if (rec.has_reference) primary_records.push_back(rec);
        }
    } else {
        primary_records = records;
    }

    if (auto issues = validate_dataset(primary_records, primary_specs, ValidationMode::Calibration);
        !issues.empty()) {
        return report_validation_issues(issues, "training data", err);
    }
    if (flags.hybrid) {
        if (auto issues = validate_dataset(records, fallback_specs, ValidationMode::Calibration);
            !issues.empty()) {
            return report_validation_issues(issues, "training data (qe fallback)", err);
        }
    }

    CalibrationJob job;
    job.records = std::move(primary_records);
    job.specs = primary_specs;
    job.mode = mode;
    job.bo.init_points = flags.init;
    job.bo.steps = flags.steps;
    job.bo.seed = flags.seed;
    job.per_language = flags.per_lang;
    job.zero_threshold = flags.zero_threshold;

    if (verbose) {
        err << "[info] calibrating " << job.specs.size() << " metrics on " << job.records.size()
            << " records (" << job.bo.init_points << "+" << job.bo.steps << " evaluations)\n";
    }
    CalibrationPieces primary = run_calibration(job);

    std::shared_ptr<const CompositeConfig> fallback;
    json fallback_objective;
    if (flags.hybrid) {
        CalibrationJob qe_job;
        qe_job.records = records;
        qe_job.specs = fallback_specs;
        qe_job.mode = CalibrationMode::ReferenceFree;
        qe_job.bo = job.bo;
        qe_job.bo.seed = derive_seed(flags.seed, "qe-fallback");
        qe_job.per_language = flags.per_lang;
        qe_job.zero_threshold = flags.zero_threshold;
        CalibrationPieces qe = run_calibration(qe_job);
        fallback = std::make_shared<const CompositeConfig>(fallback_specs, qe.weights,
                                                           qe.per_lang);
        fallback_objective = qe.config_objective;
        for (const auto& w : qe.warnings) err << "warning: qe fallback: " << w << "\n";
    }

    for (const auto& w : primary.warnings) err << "warning: " << w << "\n";

    CompositeConfig config(primary_specs, primary.weights, primary.per_lang, fallback);

    json provenance{{"tool_version", kToolVersion},
                    {"seed", flags.seed},
                    {"objective", "kendall_tau_b"},
                    {"objective_value", primary.config_objective},
                    {"zero_threshold", flags.zero_threshold},
                    {"bo", bo_provenance(job.bo)},
                    {"kernel", kernel_provenance()}};
    if (!primary.per_lang_objectives.is_null()) {
        provenance["per_lang_objectives"] = primary.per_lang_objectives;
    }
    if (!fallback_objective.is_null()) {
        provenance["qe_fallback_objective_value"] = fallback_objective;
    }
    if (!primary.warnings.empty()) {
        provenance["warnings"] = primary.warnings;
    }

    ConfigDocument doc{flags.mode, std::move(config), std::move(provenance)};
    write_file_atomic(flags.out, serialize_config(doc));

    out << "calibrated " << primary_specs.size() << " metrics on " << job.records.size()
        << " records\n";
    out << "best objective (kendall_tau_b): " << fmt6(primary.best_objective) << "\n";
    out << "config objective after sparsification: " << fmt6(primary.config_objective) << "\n";
    if (!primary.per_lang.empty()) {
        out << "per-language weight vectors: " << primary.per_lang.size() << "\n";
    }
    if (fallback) {
        out << "qe fallback objective: " << fmt6(fallback_objective.get<double>()) << "\n";
    }
    out << "wrote " << flags.out << "\n";
    return 0;
}

int cmd_score(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
    const ConfigDocument doc = read_config(flags.config);
    const std::vector<SegmentRecord> records = read_dataset(flags.data, false);

    const std::vector<BatchEntry> entries =
        score_batch(records, doc.config, flags.hybrid, flags.lenient);

    std::ostringstream lines;
    std::size_t skipped = 0;
    for (const auto& entry : entries) {
        json j{{"lang_pair", entry.key.lang_pair},
               {"system_id", entry.key.system_id},
               {"segment_id", entry.key.segment_id}};
        if (entry.skipped()) {
            ++skipped;
            j["skipped"] = true;
            j["error"] = entry.error;
        } else {
            const ScoredSegment& s = *entry.scored;
            j["composite_score"] = s.composite_score;
            j["config_used"] = s.config_used == ConfigUsed::Primary ? "primary" : "qe_fallback";
            j["weights_used"] = s.weights_used.per_lang
                                    ? "per_lang:" + s.weights_used.lang_pair
                                    : std::string("global");
            if (flags.display_normalized) {
                j["display_normalized"] = display_normalized(s, doc.config);
            }
        }
        lines << j.dump() << "\n";
    }
    write_file_atomic(flags.out, lines.str());

    out << "scored " << entries.size() - skipped << " records";
    if (skipped > 0) out << " (" << skipped << " skipped)";
    out << " -> " << flags.out << "\n";
    if (skipped > 0 && log_level() >= 1) {
        err << "[info] " << skipped << " records skipped in lenient mode\n";
    }
    return 0;
}

struct ScoredLine {
    RowKey key;
    double composite_score;
};

std::vector<ScoredLine> read_scored_file(const std::filesystem::path& path, std::ostream& err,
                                         std::size_t& skipped_count) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open scores file '" + path.string() + "'");
    }
    const std::string source = path.filename().string();
    std::vector<ScoredLine> out;
    std::string line;
    std::size_t line_no = 0;
    skipped_count = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
        auto need = [&](const char* field) -> std::string {
            auto it = j.find(field);
            if (it == j.end() || !it->is_string()) {
                throw DataError(source + ":" + std::to_string(line_no) +
                                ": missing required field '" + std::string(field) + "'");
            }
            return it->get<std::string>();
        };
        RowKey key{need("lang_pair"), need("system_id"), need("segment_id")};
        if (j.value("skipped", false)) {
            ++skipped_count;
            continue;
        }
        auto it = j.find("composite_score");
        if (it == j.end() || !it->is_number()) {
            throw DataError(source + ":" + std::to_string(line_no) +
                            ": missing required field 'composite_score'");
        }
        out.push_back({std::move(key), it->get<double>()});
    }
    if (skipped_count > 0) {
        err << "warning: " << skipped_count << " skipped records in the scores file were "
            << "excluded from evaluation\n";
    }
    return out;
}

void print_grouped(std::ostream& out, const std::string& label,
                   const GroupedCorrelation& tau, const GroupedCorrelation& pr,
                   const std::map<std::string, std::size_t>& sizes) {
    out << "by " << label << ":\n";
    std::set<std::string> keys;
    for (const auto& [k, v] : tau.by_group) keys.insert(k);
    for (const auto& k : tau.undefined_groups) keys.insert(k);
    for (const auto& [k, v] : pr.by_group) keys.insert(k);
    for (const auto& k : pr.undefined_groups) keys.insert(k);
    for (const auto& k : keys) {
        out << "  " << k << "  n=" << sizes.at(k);
        if (auto it = tau.by_group.find(k); it != tau.by_group.end()) {
            out << "  kendall_tau_b=" << fmt6(it->second);
        } else {
            out << "  kendall_tau_b=undefined (excluded from mean)";
        }
        if (auto it = pr.by_group.find(k); it != pr.by_group.end()) {
            out << "  pearson=" << fmt6(it->second);
        } else {
            out << "  pearson=undefined (excluded from mean)";
        }
        out << "\n";
    }
    out << "unweighted group mean:";
    out << "  kendall_tau_b=" << (tau.mean ? fmt6(*tau.mean) : "undefined");
    out << "  pearson=" << (pr.mean ? fmt6(*pr.mean) : "undefined");
    out << "\n";
}

json grouped_to_json(const GroupedCorrelation& g) {
    json out = json::object();
    for (const auto& [k, v] : g.by_group) out[k] = v;
    return out;
}

int cmd_evaluate(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
    std::size_t skipped = 0;
    const std::vector<ScoredLine> scored = read_scored_file(flags.scores, err, skipped);
    const std::vector<SegmentRecord> gold_records = read_dataset(flags.data, flags.flip_gold);

    std::map<RowKey, const SegmentRecord*> gold_index;
    for (const auto& rec : gold_records) {
        if (!gold_index.emplace(rec.key(), &rec).second) {
            throw DataError("duplicate key in data file: " + rec.key().str());
        }
    }

    std::vector<double> scores, gold;
    std::vector<std::string> lang_keys, domain_keys;
    std::vector<std::string> unmatched;
    std::set<RowKey> seen;
    for (const auto& line : scored) {
        if (!seen.insert(line.key).second) {
            throw DataError("duplicate key in scores file: " + line.key.str());
        }
        auto it = gold_index.find(line.key);
        if (it == gold_index.end()) {
            unmatched.push_back(line.key.str());
            continue;
        }
        const SegmentRecord& rec = *it->second;
        if (!rec.human_score.has_value()) {
            unmatched.push_back(line.key.str() + " (no human_score)");
            continue;
        }
        scores.push_back(line.composite_score);
        gold.push_back(*rec.human_score);
        lang_keys.push_back(rec.lang_pair);
        domain_keys.push_back(rec.domain.value_or("(none)"));
    }
    if (!unmatched.empty()) {
        err << "error: " << unmatched.size() << " scored key(s) not usable in the data file:\n";
        for (std::size_t i = 0; i < unmatched.size() && i < 10; ++i) {
            err << "  " << unmatched[i] << "\n";
        }
        if (unmatched.size() > 10) {
            err << "  ... and " << unmatched.size() - 10 << " more\n";
        }
        return 1;
    }
    if (scores.size() < 2) {
        throw NumericError("evaluate: need at least 2 matched records");
    }

    const double overall_tau = kendall_tau_b(scores, gold);
    const double overall_pearson = pearson(scores, gold);

    const auto& group_keys = flags.group_by == "domain" ? domain_keys : lang_keys;
    const std::string group_label = flags.group_by == "domain" ? "domain" : "lang_pair";
    const GroupedCorrelation grouped_tau =
        grouped_correlation(scores, gold, group_keys, CorrelationMeasure::KendallTauB);
    const GroupedCorrelation grouped_pearson =
        grouped_correlation(scores, gold, group_keys, CorrelationMeasure::Pearson);

    std::map<std::string, std::size_t> sizes;
    for (const auto& k : group_keys) ++sizes[k];

    out << "segments evaluated: " << scores.size() << "\n";
    out << "overall: kendall_tau_b=" << fmt6(overall_tau) << "  pearson="
        << fmt6(overall_pearson) << "\n";
    print_grouped(out, group_label, grouped_tau, grouped_pearson, sizes);

    if (!flags.out.empty()) {
        json sizes_json = json::object();
        for (const auto& [k, n] : sizes) sizes_json[k] = n;
        json report{
            {"n", scores.size()},
            {"overall", {{"kendall_tau_b", overall_tau}, {"pearson", overall_pearson}}},
            {"group_by", group_label},
            {"group_sizes", sizes_json},
            {"groups",
             {{"kendall_tau_b", grouped_to_json(grouped_tau)},
              {"pearson", grouped_to_json(grouped_pearson)}}},
            {"undefined_groups",
             {{"kendall_tau_b", grouped_tau.undefined_groups},
              {"pearson", grouped_pearson.undefined_groups}}}};
        if (grouped_tau.mean) report["group_mean"]["kendall_tau_b"] = *grouped_tau.mean;
        if (grouped_pearson.mean) report["group_mean"]["pearson"] = *grouped_pearson.mean;
        write_file_atomic(flags.out, report.dump(2) + "\n");
        out << "wrote " << flags.out << "\n";
    }
    return 0;
}

void render_composite(std::ostream& out, const CompositeConfig& config, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    std::size_t name_width = 0;
    for (const auto& s : config.specs) name_width = std::max(name_width, s.name.size());

    out << pad << "metrics:\n";
    for (std::size_t i = 0; i < config.specs.size(); ++i) {
        const auto& s = config.specs[i];
        out << pad << "  " << std::left << std::setw(static_cast<int>(name_width) + 2) << s.name
            << "clip=" << fmt_clip(s.clip_min, s.clip_max) << "  invert="
            << (s.invert ? "yes" : "no ") << "  needs_reference="
            << (s.needs_reference ? "yes" : "no ") << "  weight=" << fmt4(config.weights[i]);
        if (config.weights[i] == 0.0) out << " (inactive)";
        out << "\n";
    }
    if (!config.per_lang.empty()) {
        out << pad << "per-language overrides:\n";
        for (const auto& [pair, weights] : config.per_lang) {
            out << pad << "  " << pair << ":";
            for (double w : weights) out << " " << fmt4(w);
            out << "\n";
        }
    }
    if (config.qe_fallback) {
        out << pad << "qe_fallback:\n";
        render_composite(out, *config.qe_fallback, indent + 2);
    }
}

int cmd_inspect(const CommonFlags& flags, std::ostream& out, std::ostream&) {
    const ConfigDocument doc = read_config(flags.config);
    out << "mode: " << doc.mode << "\n";
    render_composite(out, doc.config, 0);
    if (!doc.provenance.is_null()) {
        out << "provenance:\n";
        std::istringstream dumped(doc.provenance.dump(2));
        std::string line;
        while (std::getline(dumped, line)) {
            out << "  " << line << "\n";
        }
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"metricfuse: calibrate, apply, and evaluate composite MT metrics"};
    app.require_subcommand(1);

    CommonFlags flags;

    CLI::App* calibrate = app.add_subcommand(
        "calibrate", "Fit composite weights against human judgments");
    calibrate->add_option("--train", flags.train, "Training dataset (jsonl)")->required();
    calibrate->add_option("--metrics", flags.metrics, "Metric declaration file (json)")
        ->required();
    calibrate->add_option("--out", flags.out, "Output config path")->required();
    calibrate->add_option("--mode", flags.mode, "Metric mode")
        ->check(CLI::IsMember({"ref", "qe"}))
        ->capture_default_str();
    calibrate->add_option("--steps", flags.steps, "Optimization steps")->capture_default_str();
    calibrate->add_option("--init", flags.init, "Random initialization points")
        ->capture_default_str();
    calibrate->add_option("--seed", flags.seed, "Random seed")->capture_default_str();
    calibrate->add_option("--zero-threshold", flags.zero_threshold,
                          "Weights below this become exactly 0")
        ->capture_default_str();
    calibrate->add_flag("--per-lang", flags.per_lang,
                        "Calibrate one weight vector per language pair");
    calibrate->add_flag("--hybrid", flags.hybrid,
                        "Also calibrate a reference-free fallback and embed it");
    calibrate->add_flag("--flip-gold", flags.flip_gold,
                        "Negate human scores at ingestion (lower-is-better gold)");

    CLI::App* score = app.add_subcommand("score", "Apply a saved config to new data");
    score->add_option("--data", flags.data, "Dataset to score (jsonl)")->required();
    score->add_option("--config", flags.config, "Calibrated config file")->required();
    score->add_option("--out", flags.out, "Output path (jsonl)")->required();
    score->add_flag("--hybrid", flags.hybrid,
                    "Route records without references to the qe fallback");
    score->add_flag("--lenient", flags.lenient, "Skip unscorable records instead of aborting");
    score->add_flag("--display-normalized", flags.display_normalized,
                    "Also emit score / sum(weights), display only");
    score->add_option("--seed", flags.seed, "Random seed (unused; scoring is deterministic)");

    CLI::App* evaluate = app.add_subcommand("evaluate", "Correlate scores with gold judgments");
    evaluate->add_option("--scores", flags.scores, "Scored file from 'score' (jsonl)")
        ->required();
    evaluate->add_option("--data", flags.data, "Gold-bearing dataset (jsonl)")->required();
    evaluate->add_option("--group-by", flags.group_by, "Grouping for the report")
        ->check(CLI::IsMember({"lang", "domain"}))
        ->capture_default_str();
    evaluate->add_option("--out", flags.out, "Optional machine-readable report (json)");
    evaluate->add_flag("--flip-gold", flags.flip_gold,
                       "Negate human scores at ingestion (lower-is-better gold)");
    evaluate->add_option("--seed", flags.seed, "Random seed (unused; evaluation is deterministic)");

    CLI::App* inspect = app.add_subcommand("inspect", "Render a config in tabular form");
    inspect->add_option("--config", flags.config, "Config file to render")->required();
    inspect->add_option("--seed", flags.seed, "Random seed (unused)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (calibrate->parsed()) return cmd_calibrate(flags, out, err);
        if (score->parsed()) return cmd_score(flags, out, err);
        if (evaluate->parsed()) return cmd_evaluate(flags, out, err);
        if (inspect->parsed()) return cmd_inspect(flags, out, err);
    } catch (const NumericError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace metricfuse
