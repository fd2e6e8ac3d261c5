#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "metricfuse/gp.hpp"

namespace metricfuse {

// Deterministic uniform stream; the only randomness source in the
// optimizer. Draws are identical across platforms for a given seed.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    // Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

struct BoConfig {
    int dimension = 1;
    int init_points = 5;
    int steps = 100;
    std::uint64_t seed = 0;
    double kappa = 2.576;
    // 0 means the default: 1000 * dimension, capped at 20000.
    int candidate_count = 0;

    int effective_candidate_count() const;
    void validate() const;
};

// Upper confidence bound: mean + kappa * sqrt(variance).
double ucb(const GpPosterior& posterior, double kappa);

// Argmax of the acquisition over candidate_count uniform samples in
// [0,1]^N (ties broken by lowest candidate index), then refined by a
// coordinate-wise golden-section search (20 shrink iterations per
// coordinate, bracket radius 0.25, clamped to bounds, endpoints probed).
// Refined points are accepted only on strict acquisition improvement.
std::vector<double> suggest(const GpState& state, const BoConfig& config, SeededRng& rng);

struct TraceEntry {
    int iteration;
    std::vector<double> point;
    double objective;  // -inf when the evaluation failed
};

struct BoResult {
    std::vector<double> best_point;
    double best_objective;
    std::vector<TraceEntry> trace;
};

// Sequential maximization loop: init_points seeded-uniform evaluations,
// then `steps` rounds of fit-surrogate / maximize-acquisition / evaluate.
// Exactly init_points + steps evaluations are made; failed evaluations
// (objective throws a data or numeric error, or returns a non-finite value)
// are recorded as -inf, never become the incumbent, and are excluded from
// the surrogate fit. Fully reproducible for a given seed.
BoResult optimize(const std::function<double(std::span<const double>)>& objective,
                  const BoConfig& config);

}  // namespace metricfuse
