#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metricfuse/types.hpp"

namespace metricfuse {

enum class CorrelationMeasure { KendallTauB, Pearson };

// Tie-corrected Kendall rank correlation:
//   tau_b = (C - D) / sqrt((C + D + T_x) (C + D + T_y))
// where C/D count concordant/discordant pairs and T_x/T_y count pairs tied
// only in x / only in y. Computed in O(n log n) via sort plus merge-based
// inversion counting; all pair counts are exact integers. Undefined (and an
// error) when either vector is entirely tied or has fewer than 2 entries.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

// Sample Pearson coefficient. Undefined when either vector has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

struct GroupedCorrelation {
    // Group key -> coefficient, for every group where the measure is defined.
    std::map<std::string, double> by_group;
    // Groups where the measure is undefined (size 1, all ties, zero
    // variance); excluded from the mean.
    std::vector<std::string> undefined_groups;
    // Unweighted arithmetic mean over defined groups; absent when no group
    // is defined.
    std::optional<double> mean;
};

GroupedCorrelation grouped_correlation(std::span<const double> scores,
                                       std::span<const double> gold,
                                       const std::vector<std::string>& group_keys,
                                       CorrelationMeasure measure);

}  // namespace metricfuse
