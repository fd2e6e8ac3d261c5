#include "metricfuse/types.hpp"

#include <cmath>
#include <set>

namespace metricfuse {

MetricSpec::MetricSpec(std::string name_, double clip_min_, double clip_max_,
                       bool invert_, bool needs_reference_)
    : name(std::move(name_)),
      clip_min(clip_min_),
      clip_max(clip_max_),
      invert(invert_),
      needs_reference(needs_reference_) {
    if (name.empty()) {
        throw std::invalid_argument("metric spec: name must be non-empty");
    }
    if (!std::isfinite(clip_min) || !std::isfinite(clip_max)) {
        throw std::invalid_argument("metric spec '" + name + "': clip bounds must be finite");
    }
    if (!(clip_min < clip_max)) {
        throw std::invalid_argument("metric spec '" + name +
                                    "': clip_min must be strictly below clip_max");
    }
}

void require_unique_names(const std::vector<MetricSpec>& specs) {
    std::set<std::string> seen;
    for (const auto& spec : specs) {
        if (!seen.insert(spec.name).second) {
            throw std::invalid_argument("duplicate metric name '" + spec.name + "'");
        }
    }
}

std::string RowKey::str() const {
    return lang_pair + "/" + system_id + "/" + segment_id;
}

namespace {

void check_weight_vector(const std::vector<double>& weights, std::size_t n_specs,
                         const std::string& what) {
    if (weights.size() != n_specs) {
        throw std::invalid_argument(what + ": expected " + std::to_string(n_specs) +
                                    " weights, got " + std::to_string(weights.size()));
    }
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
            throw std::invalid_argument(what + ": weights must lie in [0,1]");
        }
    }
}

}  // namespace

CompositeConfig::CompositeConfig(std::vector<MetricSpec> specs_, std::vector<double> weights_,
                                 std::map<std::string, std::vector<double>> per_lang_,
                                 std::shared_ptr<const CompositeConfig> qe_fallback_)
    : specs(std::move(specs_)),
      weights(std::move(weights_)),
      per_lang(std::move(per_lang_)),
      qe_fallback(std::move(qe_fallback_)) {
    if (specs.empty()) {
        throw std::invalid_argument("composite config: needs at least one metric");
    }
    require_unique_names(specs);
    check_weight_vector(weights, specs.size(), "composite config");
    for (const auto& [pair, vec] : per_lang) {
        check_weight_vector(vec, specs.size(), "per-language weights for '" + pair + "'");
    }
    if (qe_fallback) {
        for (const auto& spec : qe_fallback->specs) {
            if (spec.needs_reference) {
                throw std::invalid_argument("qe fallback may not contain reference-based metric '" +
                                            spec.name + "'");
            }
        }
    }
}

bool operator==(const CompositeConfig& a, const CompositeConfig& b) {
    auto spec_eq = [](const MetricSpec& x, const MetricSpec& y) {
        return x.name == y.name && x.clip_min == y.clip_min && x.clip_max == y.clip_max &&
               x.invert == y.invert && x.needs_reference == y.needs_reference;
    };
    if (a.specs.size() != b.specs.size()) return false;
    for (std::size_t i = 0; i < a.specs.size(); ++i) {
        if (!spec_eq(a.specs[i], b.specs[i])) return false;
    }
    if (a.weights != b.weights || a.per_lang != b.per_lang) return false;
    if (static_cast<bool>(a.qe_fallback) != static_cast<bool>(b.qe_fallback)) return false;
    if (a.qe_fallback && !(*a.qe_fallback == *b.qe_fallback)) return false;
    return true;
}

std::vector<ValidationIssue> validate_dataset(const std::vector<SegmentRecord>& records,
                                              const std::vector<MetricSpec>& specs,
                                              ValidationMode mode) {
    require_unique_names(specs);
    std::vector<ValidationIssue> issues;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (mode == ValidationMode::Calibration && !rec.human_score.has_value()) {
            issues.push_back({i, rec.key(), "missing human_score"});
        }
        for (const auto& spec : specs) {
            if (!rec.raw_scores.contains(spec.name)) {
                issues.push_back({i, rec.key(), "missing score for metric '" + spec.name + "'"});
            }
        }
    }
    return issues;
}

}  // namespace metricfuse
