#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metricfuse/types.hpp"

namespace metricfuse {

enum class ConfigUsed { Primary, QeFallback };

struct WeightsUsed {
    bool per_lang = false;
    std::string lang_pair;  // set when per_lang

    friend bool operator==(const WeightsUsed&, const WeightsUsed&) = default;
};

struct ScoredSegment {
    RowKey key;
    double composite_score;
    ConfigUsed config_used;
    WeightsUsed weights_used;
};

// Scores one record with the config. In hybrid mode records without a
// reference are routed to config.qe_fallback (an error when absent); the
// weight vector is the per-language override when one exists for the
// record's pair, else the global vector. Pure: identical inputs give
// bitwise identical scores.
ScoredSegment score_segment(const SegmentRecord& record, const CompositeConfig& config,
                            bool hybrid);

// score / sum of the active weights; display-only convenience, never fed
// into correlations.
double display_normalized(const ScoredSegment& segment, const CompositeConfig& config);

struct BatchEntry {
    RowKey key;
    std::optional<ScoredSegment> scored;
    std::string error;  // set iff the record was skipped (lenient mode)

    bool skipped() const { return !scored.has_value(); }
};

// Order-preserving map of score_segment. Strict mode (lenient = false)
// aborts on the first failing record, naming it; lenient mode emits a skip
// entry and continues.
std::vector<BatchEntry> score_batch(const std::vector<SegmentRecord>& records,
                                    const CompositeConfig& config, bool hybrid, bool lenient);

}  // namespace metricfuse
