#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "metricfuse/bayes_opt.hpp"
#include "metricfuse/types.hpp"

namespace metricfuse {

enum class CalibrationMode { ReferenceBased, ReferenceFree };

struct CalibrationJob {
    std::vector<SegmentRecord> records;
    std::vector<MetricSpec> specs;
    CalibrationMode mode = CalibrationMode::ReferenceBased;
    BoConfig bo;
    bool per_language = false;
    double zero_threshold = 1e-3;
};

// Weighted sum of one preprocessed row; the composite metric value.
double composite(std::span<const double> weights, std::span<const double> row);

// Kendall tau-b between the composite applied row-wise and the gold scores.
// The tuning objective; pooled over the rows of the slice.
double objective_tau(std::span<const double> weights, const ScoreMatrix& matrix,
                     std::span<const double> gold);

// Entries below the threshold become exactly 0, except that the largest
// entry (lowest index on ties) is always retained, so a non-zero input
// never collapses to the all-zero vector.
std::vector<double> sparsify(std::vector<double> weights, double threshold);

struct CalibrationResult {
    CompositeConfig config;      // sparsified incumbent weights
    double best_objective;       // max objective over the trace
    double config_objective;     // objective of the sparsified config on its slice
    std::vector<TraceEntry> trace;
    std::uint64_t seed;
};

// Preprocesses once, maximizes objective_tau over the weight cube with the
// configured budget, then sparsifies the incumbent.
CalibrationResult calibrate_global(const CalibrationJob& job);

struct PerLanguageResult {
    CompositeConfig config;  // global weights plus one per_lang entry per pair
    CalibrationResult global;
    std::map<std::string, CalibrationResult> per_pair;
    // Pairs whose slice had an undefined objective; they fall back to the
    // global weights.
    std::vector<std::string> warnings;
};

// One calibration per distinct lang_pair (each on its own slice, with a
// seed derived from the job seed and the pair name), plus the global
// calibration kept as the fallback for unseen pairs.
PerLanguageResult calibrate_per_language(const CalibrationJob& job);

// Deterministic per-pair seed derivation; independent of scheduling order.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

}  // namespace metricfuse
