#include "metricfuse/scoring.hpp"

#include <numeric>

#include "metricfuse/calibration.hpp"
#include "metricfuse/preprocess.hpp"

namespace metricfuse {

ScoredSegment score_segment(const SegmentRecord& record, const CompositeConfig& config,
                            bool hybrid) {
    const CompositeConfig* active = &config;
    ConfigUsed used = ConfigUsed::Primary;
    if (hybrid && !record.has_reference) {
        if (!config.qe_fallback) {
            throw DataError("record " + record.key().str() +
                            ": no reference and the config has no qe_fallback");
        }
        active = config.qe_fallback.get();
        used = ConfigUsed::QeFallback;
    }

    WeightsUsed weights_used;
    const std::vector<double>* weights = &active->weights;
    if (auto it = active->per_lang.find(record.lang_pair); it != active->per_lang.end()) {
        weights = &it->second;
        weights_used.per_lang = true;
        weights_used.lang_pair = record.lang_pair;
    }

    std::vector<double> row;
    row.reserve(active->specs.size());
    for (const auto& spec : active->specs) {
        auto it = record.raw_scores.find(spec.name);
        if (it == record.raw_scores.end()) {
            throw DataError("record " + record.key().str() + ": missing score for metric '" +
                            spec.name + "'");
        }
        try {
            row.push_back(preprocess_score(it->second, spec));
        } catch (const DataError& e) {
            throw DataError("record " + record.key().str() + ": " + e.what());
        }
    }
    return ScoredSegment{record.key(), composite(*weights, row), used, std::move(weights_used)};
}

double display_normalized(const ScoredSegment& segment, const CompositeConfig& config) {
    const CompositeConfig* active =
        segment.config_used == ConfigUsed::QeFallback ? config.qe_fallback.get() : &config;
    if (active == nullptr) {
        throw std::invalid_argument("display_normalized: segment used a fallback the config lacks");
    }
    const std::vector<double>* weights = &active->weights;
    if (segment.weights_used.per_lang) {
        auto it = active->per_lang.find(segment.weights_used.lang_pair);
        if (it == active->per_lang.end()) {
            throw std::invalid_argument("display_normalized: unknown per-language weights");
        }
        weights = &it->second;
    }
    const double total = std::accumulate(weights->begin(), weights->end(), 0.0);
    if (total <= 0.0) {
        throw DataError("display_normalized: active weights sum to zero");
    }
    return segment.composite_score / total;
}

std::vector<BatchEntry> score_batch(const std::vector<SegmentRecord>& records,
                                    const CompositeConfig& config, bool hybrid, bool lenient) {
    std::vector<BatchEntry> out;
    out.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        try {
            out.push_back(BatchEntry{rec.key(), score_segment(rec, config, hybrid), {}});
        } catch (const DataError& e) {
            if (!lenient) {
                throw DataError("record " + std::to_string(i + 1) + " (" + rec.key().str() +
                                "): " + e.what());
            }
            out.push_back(BatchEntry{rec.key(), std::nullopt, e.what()});
        }
    }
    return out;
}

}  // namespace metricfuse
