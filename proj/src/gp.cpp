#include "metricfuse/gp.hpp"

#include <cmath>

namespace metricfuse {

namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873;
constexpr double kMaxJitter = 1e-4;

void check_dimensions(const std::vector<std::vector<double>>& points) {
    if (points.empty()) {
        throw std::invalid_argument("gp: need at least one point");
    }
    const std::size_t dim = points[0].size();
    if (dim == 0) {
        throw std::invalid_argument("gp: points must have dimension >= 1");
    }
    for (const auto& p : points) {
        if (p.size() != dim) {
            throw std::invalid_argument("gp: inconsistent point dimensions");
        }
    }
}

}  // namespace

void validate_kernel_params(const KernelParams& params) {
    if (!(params.length_scale > 0.0) || !std::isfinite(params.length_scale)) {
        throw std::invalid_argument("kernel: length_scale must be positive");
    }
    if (!(params.signal_variance > 0.0) || !std::isfinite(params.signal_variance)) {
        throw std::invalid_argument("kernel: signal_variance must be positive");
    }
    if (params.noise_variance < 0.0 || !std::isfinite(params.noise_variance)) {
        throw std::invalid_argument("kernel: noise_variance must be non-negative");
    }
    if (!(params.jitter > 0.0) || !std::isfinite(params.jitter)) {
        throw std::invalid_argument("kernel: jitter must be positive");
    }
}

double matern25(std::span<const double> x1, std::span<const double> x2,
                const KernelParams& params) {
    validate_kernel_params(params);
    if (x1.size() != x2.size()) {
        throw std::invalid_argument("matern25: dimension mismatch");
    }
    double r2 = 0.0;
    for (std::size_t i = 0; i < x1.size(); ++i) {
        const double d = x1[i] - x2[i];
        r2 += d * d;
    }
    if (r2 == 0.0) {
        return params.signal_variance;
    }
    const double t = kSqrt5 * std::sqrt(r2) / params.length_scale;
    return params.signal_variance * (1.0 + t + t * t / 3.0) * std::exp(-t);
}

Eigen::MatrixXd gram(const std::vector<std::vector<double>>& points,
                     const KernelParams& params) {
    validate_kernel_params(params);
    check_dimensions(points);
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = params.signal_variance + params.noise_variance + params.jitter;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = matern25(points[static_cast<std::size_t>(i)],
                                      points[static_cast<std::size_t>(j)], params);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

GpState GpState::with_default_kernel(std::vector<std::vector<double>> observed_x,
                                     std::vector<double> observed_y) {
    check_dimensions(observed_x);
    if (observed_x.size() != observed_y.size()) {
        throw std::invalid_argument("gp state: observation count mismatch");
    }
    GpState state;
    state.observed_x = std::move(observed_x);
    state.observed_y = std::move(observed_y);

    const auto n = static_cast<double>(state.observed_y.size());
    double mean = 0.0;
    for (double y : state.observed_y) mean += y;
    mean /= n;
    double var = 0.0;
    for (double y : state.observed_y) var += (y - mean) * (y - mean);
    var /= n;

    state.kernel.length_scale = 0.25 * std::sqrt(static_cast<double>(state.observed_x[0].size()));
    state.kernel.signal_variance = std::max(var, 1e-4);
    state.kernel.noise_variance = 1e-6;
    state.kernel.jitter = 1e-10;
    return state;
}

FittedGp::FittedGp(const GpState& state) : x_(state.observed_x), kernel_(state.kernel) {
    validate_kernel_params(kernel_);
    check_dimensions(x_);
    if (state.observed_x.size() != state.observed_y.size()) {
        throw std::invalid_argument("gp state: observation count mismatch");
    }

    const auto n = static_cast<Eigen::Index>(state.observed_y.size());
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = state.observed_y[static_cast<std::size_t>(i)];
    y_mean_ = y.mean();
    const Eigen::VectorXd centered = y.array() - y_mean_;

    for (;;) {
        llt_.compute(gram(x_, kernel_));
        if (llt_.info() == Eigen::Success) break;
        kernel_.jitter *= 10.0;
        if (kernel_.jitter > kMaxJitter) {
            throw NumericError("gp: factorization failed; observations are ill-conditioned");
        }
    }
    alpha_ = llt_.solve(centered);
}

GpPosterior FittedGp::predict(std::span<const double> query) const {
    if (query.size() != x_[0].size()) {
        throw std::invalid_argument("gp: query dimension mismatch");
    }
    const auto n = static_cast<Eigen::Index>(x_.size());
    Eigen::VectorXd kstar(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        kstar(i) = matern25(x_[static_cast<std::size_t>(i)], query, kernel_);
    }
    GpPosterior out;
    out.mean = y_mean_ + kstar.dot(alpha_);
    out.variance = std::max(kernel_.signal_variance - kstar.dot(llt_.solve(kstar)), 0.0);
    return out;
}

GpPosterior posterior(const GpState& state, std::span<const double> query) {
    return FittedGp(state).predict(query);
}

}  // namespace metricfuse
