#include "metricfuse/preprocess.hpp"

#include <cmath>

namespace metricfuse {

double clip(double y, const MetricSpec& spec) {
    if (!std::isfinite(y)) {
        throw DataError("non-finite score for metric '" + spec.name + "'");
    }
    return std::min(std::max(y, spec.clip_min), spec.clip_max);
}

double normalize(double y_clipped, const MetricSpec& spec) {
    if (y_clipped < spec.clip_min || y_clipped > spec.clip_max) {
        throw std::invalid_argument("normalize: value outside clip range for metric '" +
                                    spec.name + "'");
    }
    return (y_clipped - spec.clip_min) / (spec.clip_max - spec.clip_min);
}

double invert_score(double y_norm, const MetricSpec& spec) {
    if (y_norm < 0.0 || y_norm > 1.0) {
        throw std::invalid_argument("invert_score: value outside [0,1] for metric '" +
                                    spec.name + "'");
    }
    return spec.invert ? 1.0 - y_norm : y_norm;
}

double preprocess_score(double raw, const MetricSpec& spec) {
    return invert_score(normalize(clip(raw, spec), spec), spec);
}

ScoreMatrix preprocess_matrix(const std::vector<SegmentRecord>& records,
                              const std::vector<MetricSpec>& specs) {
    require_unique_names(specs);
    ScoreMatrix matrix;
    matrix.metric_order.reserve(specs.size());
    for (const auto& spec : specs) {
        matrix.metric_order.push_back(spec.name);
    }
    matrix.rows.reserve(records.size());
    matrix.row_keys.reserve(records.size());
    for (const auto& rec : records) {
        std::vector<double> row;
        row.reserve(specs.size());
        for (const auto& spec : specs) {
            auto it = rec.raw_scores.find(spec.name);
            if (it == rec.raw_scores.end()) {
                throw DataError("record " + rec.key().str() + ": missing score for metric '" +
                                spec.name + "'");
            }
            try {
                row.push_back(preprocess_score(it->second, spec));
            } catch (const DataError& e) {
                throw DataError("record " + rec.key().str() + ": " + e.what());
            }
        }
        matrix.rows.push_back(std::move(row));
        matrix.row_keys.push_back(rec.key());
    }
    return matrix;
}

}  // namespace metricfuse
