#include "metricfuse/bayes_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace metricfuse {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInvPhi = 0.61803398874989484820;  // (sqrt(5) - 1) / 2
constexpr double kRefineRadius = 0.25;
constexpr int kRefineIterations = 20;

std::vector<double> random_point(int dimension, SeededRng& rng) {
    std::vector<double> p(static_cast<std::size_t>(dimension));
    for (auto& v : p) v = rng.uniform01();
    return p;
}

// Golden-section maximization of acq along coordinate d, bracketed around
// the current value and clamped to [0,1]. Returns the best probe.
template <typename Acq>
std::pair<double, double> refine_coordinate(const Acq& acq, std::vector<double>& point,
                                            std::size_t d) {
    const double center = point[d];
    double a = std::max(0.0, center - kRefineRadius);
    double b = std::min(1.0, center + kRefineRadius);

    auto eval = [&](double v) {
        point[d] = v;
        return acq(point);
    };

    double best_v = a;
    double best_f = eval(a);
    const double fb = eval(b);
    if (fb > best_f) {
        best_v = b;
        best_f = fb;
    }

    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = eval(x1);
    double f2 = eval(x2);
    for (int it = 0; it < kRefineIterations; ++it) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = eval(x2);
        }
        if (f1 > best_f) {
            best_v = x1;
            best_f = f1;
        }
        if (f2 > best_f) {
            best_v = x2;
            best_f = f2;
        }
    }
    point[d] = center;
    return {best_v, best_f};
}

}  // namespace

int BoConfig::effective_candidate_count() const {
    if (candidate_count > 0) return candidate_count;
    return std::min(1000 * dimension, 20000);
}

void BoConfig::validate() const {
    if (dimension < 1) throw std::invalid_argument("bo config: dimension must be >= 1");
    if (init_points < 1) throw std::invalid_argument("bo config: init_points must be >= 1");
    if (steps < 0) throw std::invalid_argument("bo config: steps must be >= 0");
    if (candidate_count < 0) throw std::invalid_argument("bo config: candidate_count must be >= 0");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
        throw std::invalid_argument("bo config: kappa must be >= 0");
    }
}

double ucb(const GpPosterior& posterior, double kappa) {
    return posterior.mean + kappa * std::sqrt(std::max(posterior.variance, 0.0));
}

std::vector<double> suggest(const GpState& state, const BoConfig& config, SeededRng& rng) {
    config.validate();
    if (state.observed_x.empty()) {
        throw std::invalid_argument("suggest: state must hold at least one observation");
    }
    const FittedGp gp(state);
    auto acq = [&](const std::vector<double>& p) { return ucb(gp.predict(p), config.kappa); };

    std::vector<double> best;
    double best_acq = kNegInf;
    const int m = config.effective_candidate_count();
    for (int i = 0; i < m; ++i) {
        std::vector<double> candidate = random_point(config.dimension, rng);
        const double a = acq(candidate);
        if (a > best_acq) {
            best_acq = a;
            best = std::move(candidate);
        }
    }

    for (std::size_t d = 0; d < best.size(); ++d) {
        const auto [v, f] = refine_coordinate(acq, best, d);
        if (f > best_acq) {
            best[d] = v;
            best_acq = f;
        }
    }
    return best;
}

BoResult optimize(const std::function<double(std::span<const double>)>& objective,
                  const BoConfig& config) {
    config.validate();
    SeededRng rng(config.seed);

    BoResult result;
    result.trace.reserve(static_cast<std::size_t>(config.init_points + config.steps));
    std::vector<std::vector<double>> observed_x;
    std::vector<double> observed_y;

    auto evaluate = [&](std::vector<double> point) {
        double value;
        try {
            value = objective(point);
            if (!std::isfinite(value)) value = kNegInf;
        } catch (const DataError&) {
            value = kNegInf;
        } catch (const NumericError&) {
            value = kNegInf;
        }
        if (value != kNegInf) {
            observed_x.push_back(point);
            observed_y.push_back(value);
        }
        result.trace.push_back(
            {static_cast<int>(result.trace.size()), std::move(point), value});
    };

    for (int i = 0; i < config.init_points; ++i) {
        evaluate(random_point(config.dimension, rng));
    }
    for (int s = 0; s < config.steps; ++s) {
        if (observed_x.empty()) {
            // No usable observation yet; keep spending the budget on random
            // points until one succeeds.
            evaluate(random_point(config.dimension, rng));
            continue;
        }
        evaluate(suggest(GpState::with_default_kernel(observed_x, observed_y), config, rng));
    }

    result.best_objective = kNegInf;
    for (const auto& entry : result.trace) {
        if (entry.objective > result.best_objective) {
            result.best_objective = entry.objective;
            result.best_point = entry.point;
        }
    }
    if (result.best_point.empty()) {
        throw NumericError("optimize: every objective evaluation failed");
    }
    return result;
}

}  // namespace metricfuse
