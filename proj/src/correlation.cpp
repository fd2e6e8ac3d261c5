#include "metricfuse/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace metricfuse {

namespace {

void check_finite(std::span<const double> v, const char* what) {
    for (double e : v) {
        if (!std::isfinite(e)) {
            throw std::invalid_argument(std::string(what) + ": non-finite value");
        }
    }
}

bool all_tied(std::span<const double> v) {
    for (double e : v) {
        if (e != v[0]) return false;
    }
    return true;
}

// Pairs within runs of equal values: sum over runs of t*(t-1)/2.
std::int64_t tied_pairs(const std::vector<double>& sorted) {
    std::int64_t total = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const std::int64_t t = static_cast<std::int64_t>(j - i);
        total += t * (t - 1) / 2;
        i = j;
    }
    return total;
}

// Counts pairs i < j with v[i] > v[j] (strict), via stable merge sort.
std::int64_t count_inversions(std::vector<double>& v, std::vector<double>& buf) {
    const std::size_t n = v.size();
    std::int64_t swaps = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t a = lo, b = mid, out = lo;
            while (a < mid && b < hi) {
                if (v[a] <= v[b]) {
                    buf[out++] = v[a++];
                } else {
                    swaps += static_cast<std::int64_t>(mid - a);
                    buf[out++] = v[b++];
                }
            }
            while (a < mid) buf[out++] = v[a++];
            while (b < hi) buf[out++] = v[b++];
            std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                      buf.begin() + static_cast<std::ptrdiff_t>(hi),
                      v.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    return swaps;
}

}  // namespace

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("kendall_tau_b: length mismatch");
    }
    const std::size_t n = x.size();
    if (n < 2) {
        throw NumericError("kendall_tau_b: undefined for fewer than 2 observations");
    }
    check_finite(x, "kendall_tau_b");
    check_finite(y, "kendall_tau_b");
    if (all_tied(x) || all_tied(y)) {
        throw NumericError("kendall_tau_b: undefined when a vector is entirely tied");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // Run lengths over the x-sorted order: pairs tied in x, and tied in both.
    std::int64_t n1 = 0, n3 = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j < n && x[order[j]] == x[order[i]]) ++j;
            const std::int64_t t = static_cast<std::int64_t>(j - i);
            n1 += t * (t - 1) / 2;
            std::size_t k = i;
            while (k < j) {
                std::size_t m = k;
                while (m < j && y[order[m]] == y[order[k]]) ++m;
                const std::int64_t u = static_cast<std::int64_t>(m - k);
                n3 += u * (u - 1) / 2;
                k = m;
            }
            i = j;
        }
    }

    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
    std::vector<double> buf(n);
    const std::int64_t swaps = count_inversions(ys, buf);

    // ys now sorted ascending; reuse it for the y tie count.
    const std::int64_t n2 = tied_pairs(ys);

    const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    const std::int64_t concordant_minus_discordant = n0 - n1 - n2 + n3 - 2 * swaps;

    const __int128 denom_sq =
        static_cast<__int128>(n0 - n1) * static_cast<__int128>(n0 - n2);
    const double tau =
        static_cast<double>(concordant_minus_discordant) / std::sqrt(static_cast<double>(denom_sq));
    return std::clamp(tau, -1.0, 1.0);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("pearson: length mismatch");
    }
    const std::size_t n = x.size();
    if (n < 2) {
        throw NumericError("pearson: undefined for fewer than 2 observations");
    }
    check_finite(x, "pearson");
    check_finite(y, "pearson");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        throw NumericError("pearson: undefined when a vector has zero variance");
    }
    return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

GroupedCorrelation grouped_correlation(std::span<const double> scores,
                                       std::span<const double> gold,
                                       const std::vector<std::string>& group_keys,
                                       CorrelationMeasure measure) {
    if (scores.size() != gold.size() || scores.size() != group_keys.size()) {
        throw std::invalid_argument("grouped_correlation: length mismatch");
    }
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> slices;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        auto& slice = slices[group_keys[i]];
        slice.first.push_back(scores[i]);
        slice.second.push_back(gold[i]);
    }

    GroupedCorrelation result;
    double sum = 0.0;
    std::size_t defined = 0;
    for (const auto& [key, slice] : slices) {
        try {
            const double c = measure == CorrelationMeasure::KendallTauB
                                 ? kendall_tau_b(slice.first, slice.second)
                                 : pearson(slice.first, slice.second);
            result.by_group.emplace(key, c);
            sum += c;
            ++defined;
        } catch (const NumericError&) {
            result.undefined_groups.push_back(key);
        }
    }
    if (defined > 0) {
        result.mean = sum / static_cast<double>(defined);
    }
    return result;
}

}  // namespace metricfuse
