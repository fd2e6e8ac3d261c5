#include "metricfuse/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "metricfuse/correlation.hpp"
#include "metricfuse/preprocess.hpp"

namespace metricfuse {

double composite(std::span<const double> weights, std::span<const double> row) {
    if (weights.size() != row.size()) {
        throw std::invalid_argument("composite: weight/row length mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        sum += weights[i] * row[i];
    }
    return sum;
}

double objective_tau(std::span<const double> weights, const ScoreMatrix& matrix,
                     std::span<const double> gold) {
    if (matrix.rows.size() != gold.size()) {
        throw std::invalid_argument("objective_tau: matrix/gold length mismatch");
    }
    std::vector<double> composites(matrix.rows.size());
    for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
        composites[r] = composite(weights, matrix.rows[r]);
    }
    return kendall_tau_b(composites, gold);
}

std::vector<double> sparsify(std::vector<double> weights, double threshold) {
    if (threshold < 0.0 || !std::isfinite(threshold)) {
        throw std::invalid_argument("sparsify: threshold must be non-negative");
    }
    if (weights.empty()) return weights;
    const std::size_t keep = static_cast<std::size_t>(
        std::max_element(weights.begin(), weights.end(),
                         [](double a, double b) { return std::abs(a) < std::abs(b); }) -
        weights.begin());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (i != keep && std::abs(weights[i]) < threshold) {
            weights[i] = 0.0;
        }
    }
    return weights;
}

namespace {

std::vector<double> extract_gold(const std::vector<SegmentRecord>& records) {
    std::vector<double> gold;
    gold.reserve(records.size());
    for (const auto& rec : records) {
        if (!rec.human_score.has_value()) {
            throw DataError("record " + rec.key().str() + ": missing human_score");
        }
        gold.push_back(*rec.human_score);
    }
    return gold;
}

void check_job(const CalibrationJob& job) {
    if (job.records.size() < 2) {
        throw NumericError("calibration: need at least 2 records");
    }
    if (job.specs.empty()) {
        throw std::invalid_argument("calibration: need at least one metric spec");
    }
    require_unique_names(job.specs);
    if (job.mode == CalibrationMode::ReferenceBased) {
        const bool any_ref = std::any_of(job.specs.begin(), job.specs.end(),
                                         [](const MetricSpec& s) { return s.needs_reference; });
        if (!any_ref) {
            throw std::invalid_argument(
                "calibration: reference-based mode needs at least one reference-based metric");
        }
    }
    if (job.zero_threshold < 0.0 || !std::isfinite(job.zero_threshold)) {
        throw std::invalid_argument("calibration: zero_threshold must be non-negative");
    }
}

}  // namespace

CalibrationResult calibrate_global(const CalibrationJob& job) {
    check_job(job);
    const ScoreMatrix matrix = preprocess_matrix(job.records, job.specs);
    const std::vector<double> gold = extract_gold(job.records);
    if (std::all_of(gold.begin(), gold.end(), [&](double g) { return g == gold[0]; })) {
        throw NumericError("calibration: objective undefined on this slice (gold all tied)");
    }

    BoConfig bo = job.bo;
    bo.dimension = static_cast<int>(job.specs.size());

    const auto objective = [&](std::span<const double> w) {
        return objective_tau(w, matrix, gold);
    };
    BoResult run = optimize(objective, bo);

    std::vector<double> weights = sparsify(run.best_point, job.zero_threshold);
    const double config_objective = objective_tau(weights, matrix, gold);

    return CalibrationResult{CompositeConfig(job.specs, std::move(weights)),
                             run.best_objective, config_objective, std::move(run.trace),
                             bo.seed};
}

PerLanguageResult calibrate_per_language(const CalibrationJob& job) {
    check_job(job);
    CalibrationResult global = calibrate_global(job);

    std::set<std::string> pairs;
    for (const auto& rec : job.records) pairs.insert(rec.lang_pair);

    std::map<std::string, std::vector<double>> per_lang;
    std::map<std::string, CalibrationResult> per_pair;
    std::vector<std::string> warnings;
    for (const auto& pair : pairs) {
        CalibrationJob slice_job = job;
        slice_job.records.clear();
        for (const auto& rec : job.records) {
            if (rec.lang_pair == pair) slice_job.records.push_back(rec);
        }
        slice_job.bo.seed = derive_seed(job.bo.seed, pair);
        try {
            CalibrationResult r = calibrate_global(slice_job);
            per_lang.emplace(pair, r.config.weights);
            per_pair.emplace(pair, std::move(r));
        } catch (const NumericError& e) {
            per_lang.emplace(pair, global.config.weights);
            warnings.push_back("lang_pair '" + pair + "': " + e.what() +
                               "; falling back to global weights");
        }
    }

    CompositeConfig config(job.specs, global.config.weights, std::move(per_lang));
    return PerLanguageResult{std::move(config), std::move(global), std::move(per_pair),
                             std::move(warnings)};
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    // FNV-1a over the tag, then a splitmix64 finalizer; stable across
    // platforms, unlike std::hash.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::uint64_t z = seed ^ h;
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace metricfuse
