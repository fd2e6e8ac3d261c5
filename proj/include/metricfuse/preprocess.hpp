#pragma once

#include "metricfuse/types.hpp"

namespace metricfuse {

// Pipeline order is fixed: Raw -> Clipped -> Normalized (inversion folds
// into the final stage).
enum class PreprocessStage { Raw, Clipped, Normalized };

// min(max(y, clip_min), clip_max). Non-finite input signals corrupt
// upstream metric output and is a hard error, never clipped.
double clip(double y, const MetricSpec& spec);

// (y - clip_min) / (clip_max - clip_min). Requires y in [clip_min, clip_max].
double normalize(double y_clipped, const MetricSpec& spec);

// 1 - y when spec.invert, else y. Requires y in [0,1].
double invert_score(double y_norm, const MetricSpec& spec);

// invert_score(normalize(clip(raw))).
double preprocess_score(double raw, const MetricSpec& spec);

// Applies the full pipeline to every (record, spec) cell. Column order
// follows specs, row order follows records. A missing raw score is an
// error naming both the record and the metric.
ScoreMatrix preprocess_matrix(const std::vector<SegmentRecord>& records,
                              const std::vector<MetricSpec>& specs);

}  // namespace metricfuse
