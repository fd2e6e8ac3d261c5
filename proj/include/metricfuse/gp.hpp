#pragma once

#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "metricfuse/types.hpp"

namespace metricfuse {

struct KernelParams {
    double length_scale = 1.0;
    double signal_variance = 1.0;
    double noise_variance = 0.0;
    double jitter = 1e-10;
};

void validate_kernel_params(const KernelParams& params);

struct GpPosterior {
    double mean = 0.0;
    double variance = 0.0;  // clamped at 0 after round-off
};

// Matern covariance with smoothness 5/2:
//   k(r) = sv * (1 + sqrt(5) r / l + 5 r^2 / (3 l^2)) * exp(-sqrt(5) r / l)
// with r the Euclidean distance between the points.
double matern25(std::span<const double> x1, std::span<const double> x2,
                const KernelParams& params);

// Covariance matrix over the points, diagonal augmented with
// noise_variance + jitter. Symmetric positive definite by construction.
Eigen::MatrixXd gram(const std::vector<std::vector<double>>& points,
                     const KernelParams& params);

// Observed (input -> objective) pairs plus the kernel configuration.
// Smoothness is fixed at 5/2.
struct GpState {
    std::vector<std::vector<double>> observed_x;
    std::vector<double> observed_y;
    KernelParams kernel;

    static constexpr double nu = 2.5;

    // Scale-aware fixed defaults: length_scale = 0.25 * sqrt(dimension),
    // signal_variance = population variance of the observations (floored at
    // 1e-4), noise_variance = 1e-6, jitter = 1e-10.
    static GpState with_default_kernel(std::vector<std::vector<double>> observed_x,
                                       std::vector<double> observed_y);
};

// One Cholesky factorization reused across posterior queries. Observations
// are centered by their sample mean before the solve and the mean is added
// back to predictions, so far-field queries revert to the observation
// average rather than zero.
class FittedGp {
public:
    explicit FittedGp(const GpState& state);

    GpPosterior predict(std::span<const double> query) const;

    double prior_mean() const { return y_mean_; }
    // Jitter actually used, after any escalation.
    double effective_jitter() const { return kernel_.jitter; }

private:
    std::vector<std::vector<double>> x_;
    KernelParams kernel_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;  // K^{-1} (y - y_mean)
    double y_mean_ = 0.0;
};

// Posterior mean and variance at one query point: mean = k*' K^{-1} y_c +
// y_mean, variance = k(q,q) - k*' K^{-1} k*, via SPD factorization. On
// factorization failure the jitter escalates by x10 up to 1e-4 before the
// state is declared ill-conditioned.
GpPosterior posterior(const GpState& state, std::span<const double> query);

}  // namespace metricfuse
