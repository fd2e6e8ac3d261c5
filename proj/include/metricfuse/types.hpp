#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace metricfuse {

// Input data violates a contract: missing fields, malformed files, scores
// that cannot be preprocessed. Maps to CLI exit code 1.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A quantity is mathematically undefined for the given data: all-tied
// correlation input, zero variance, non-factorizable Gram matrix.
// Maps to CLI exit code 2.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Preprocessing rule for one base metric. Raw scores are clipped to
// [clip_min, clip_max], min-max normalized to [0,1], and inverted when the
// metric reports higher values for worse translations.
struct MetricSpec {
    std::string name;
    double clip_min;
    double clip_max;
    bool invert;
    bool needs_reference;

    MetricSpec(std::string name, double clip_min, double clip_max,
               bool invert, bool needs_reference);
};

// Throws if two specs share a name.
void require_unique_names(const std::vector<MetricSpec>& specs);

struct RowKey {
    std::string lang_pair;
    std::string system_id;
    std::string segment_id;

    auto operator<=>(const RowKey&) const = default;
    std::string str() const;
};

// One translation segment with its precomputed base-metric scores.
// Absent scores stay absent; they are never encoded as sentinel numbers.
struct SegmentRecord {
    std::string lang_pair;
    std::string system_id;
    std::string segment_id;
    std::optional<std::string> domain;
    bool has_reference = true;
    std::optional<double> human_score;
    std::map<std::string, double> raw_scores;

    RowKey key() const { return RowKey{lang_pair, system_id, segment_id}; }
};

// Column-aligned preprocessed scores for a dataset slice. Every entry lies
// in [0,1]; rows parallel row_keys, columns parallel metric_order.
struct ScoreMatrix {
    std::vector<std::string> metric_order;
    std::vector<std::vector<double>> rows;
    std::vector<RowKey> row_keys;
};

// Weighted-sum composite: specs plus one weight per spec in [0,1], with
// optional per-language-pair weight overrides and an optional reference-free
// fallback used by hybrid scoring. Immutable by convention after
// construction; the constructor enforces all shape invariants.
struct CompositeConfig {
    std::vector<MetricSpec> specs;
    std::vector<double> weights;
    std::map<std::string, std::vector<double>> per_lang;
    std::shared_ptr<const CompositeConfig> qe_fallback;

    CompositeConfig(std::vector<MetricSpec> specs, std::vector<double> weights,
                    std::map<std::string, std::vector<double>> per_lang = {},
                    std::shared_ptr<const CompositeConfig> qe_fallback = nullptr);
};

bool operator==(const CompositeConfig& a, const CompositeConfig& b);

enum class ValidationMode { Calibration, Scoring };

struct ValidationIssue {
    std::size_t record_index;
    RowKey key;
    std::string message;
};

// Reports every mode-specific defect, in record order. Issues are data,
// not failures: an empty report means the dataset is usable for the mode.
// Calibration requires human_score plus a score for every spec; scoring
// requires a score for every spec.
std::vector<ValidationIssue> validate_dataset(const std::vector<SegmentRecord>& records,
                                              const std::vector<MetricSpec>& specs,
                                              ValidationMode mode);

}  // namespace metricfuse
