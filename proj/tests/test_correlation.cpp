#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "metricfuse/correlation.hpp"
#include "test_util.hpp"

using namespace metricfuse;

namespace {

// Independent O(n^2) pair-enumeration oracle:
//   tau_b = (C - D) / sqrt((C + D + T_x)(C + D + T_y))
double tau_b_bruteforce(const std::vector<double>& x, const std::vector<double>& y) {
    long long concordant = 0, discordant = 0, tied_x_only = 0, tied_y_only = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const bool tx = x[i] == x[j];
            const bool ty = y[i] == y[j];
            if (tx && ty) continue;
            if (tx) {
                ++tied_x_only;
            } else if (ty) {
                ++tied_y_only;
            } else if ((x[i] < x[j]) == (y[i] < y[j])) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double lhs = static_cast<double>(concordant + discordant + tied_x_only);
    const double rhs = static_cast<double>(concordant + discordant + tied_y_only);
    return static_cast<double>(concordant - discordant) / std::sqrt(lhs * rhs);
}

std::vector<double> lattice_vector(std::mt19937_64& rng, std::size_t n, int buckets) {
    std::vector<double> v(n);
    for (auto& e : v) e = testutil::lattice(rng, buckets);
    return v;
}

bool entirely_tied(const std::vector<double>& v) {
    for (double e : v) {
        if (e != v[0]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("kendall_tau_b on small worked examples") {
    CHECK(kendall_tau_b(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}) == 1.0);
    CHECK(kendall_tau_b(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) == -1.0);

    // x = [1,2,2,3], y = [1,3,2,4]: 5 concordant, 0 discordant, one pair
    // tied only in x -> 5 / sqrt(6 * 5)
    const std::vector<double> x{1, 2, 2, 3};
    const std::vector<double> y{1, 3, 2, 4};
    CHECK(kendall_tau_b(x, y) == doctest::Approx(5.0 / std::sqrt(30.0)).epsilon(1e-12));
    CHECK(kendall_tau_b(x, y) == doctest::Approx(0.912871).epsilon(1e-6));
}

TEST_CASE("kendall_tau_b error cases") {
    CHECK_THROWS_AS(kendall_tau_b(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}),
                    std::invalid_argument);
    CHECK_THROWS_AS(kendall_tau_b(std::vector<double>{1}, std::vector<double>{1}), NumericError);
    CHECK_THROWS_AS(kendall_tau_b(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                    NumericError);
    CHECK_THROWS_AS(kendall_tau_b(std::vector<double>{1, 2, 3}, std::vector<double>{7, 7, 7}),
                    NumericError);
}

TEST_CASE("kendall_tau_b matches the pair-enumeration oracle on random tied data") {
    std::mt19937_64 rng(987654);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + rng() % 49;
        auto x = lattice_vector(rng, n, 8);
        auto y = lattice_vector(rng, n, 8);
        if (entirely_tied(x) || entirely_tied(y)) continue;
        const double got = kendall_tau_b(x, y);
        const double want = tau_b_bruteforce(x, y);
        CHECK(std::abs(got - want) <= 1e-12);
        // symmetry
        CHECK(kendall_tau_b(y, x) == got);
    }
}

TEST_CASE("kendall_tau_b is exactly invariant under strictly increasing affine maps") {
    std::mt19937_64 rng(55555);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 3 + rng() % 40;
        auto x = lattice_vector(rng, n, 16);
        auto y = lattice_vector(rng, n, 16);
        if (entirely_tied(x) || entirely_tied(y)) continue;
        const double a = 0.1 + 8.0 * testutil::uniform01(rng);
        const double b = -50.0 + 100.0 * testutil::uniform01(rng);
        std::vector<double> scaled(n);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = a * x[i] + b;
        CHECK(kendall_tau_b(scaled, y) == kendall_tau_b(x, y));
    }
}

TEST_CASE("kendall_tau_b sign flips under negation on tie-free vectors") {
    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + rng() % 30;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = testutil::uniform01(rng);
            y[i] = testutil::uniform01(rng);
        }
        std::vector<double> neg(n);
        for (std::size_t i = 0; i < n; ++i) neg[i] = -x[i];
        CHECK(kendall_tau_b(neg, y) == -kendall_tau_b(x, y));
    }
}

TEST_CASE("pearson on worked examples") {
    const std::vector<double> x{0, 1, 2};
    CHECK(pearson(x, x) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = -2.0 * x[i] + 7.0;
    CHECK(pearson(x, y) == doctest::Approx(-1.0).epsilon(1e-12));

    // r = 3 / sqrt(2 * 14/3)
    const std::vector<double> y2{0, 1, 3};
    CHECK(pearson(x, y2) == doctest::Approx(0.981).epsilon(1e-3));
    CHECK(pearson(x, y2) == doctest::Approx(3.0 / std::sqrt(2.0 * 14.0 / 3.0)).epsilon(1e-12));

    CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                    NumericError);
}

TEST_CASE("pearson is invariant under positive affine transforms") {
    std::mt19937_64 rng(13579);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + rng() % 40;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = testutil::uniform01(rng);
            y[i] = testutil::uniform01(rng);
        }
        const double base = pearson(x, y);
        const double a = 0.5 + 4.0 * testutil::uniform01(rng);
        const double b = -5.0 + 10.0 * testutil::uniform01(rng);
        std::vector<double> scaled_x(n), scaled_y(n);
        for (std::size_t i = 0; i < n; ++i) {
            scaled_x[i] = a * x[i] + b;
            scaled_y[i] = a * y[i] + b;
        }
        CHECK(std::abs(pearson(scaled_x, y) - base) <= 1e-12);
        CHECK(std::abs(pearson(x, scaled_y) - base) <= 1e-12);
    }
}

TEST_CASE("grouped_correlation aggregates defined groups and flags the rest") {
    SUBCASE("single group: mean equals the group coefficient") {
        const std::vector<double> s{1, 2, 3};
        const std::vector<double> g{10, 20, 30};
        auto res = grouped_correlation(s, g, {"en-de", "en-de", "en-de"},
                                       CorrelationMeasure::KendallTauB);
        REQUIRE(res.by_group.size() == 1);
        CHECK(res.by_group.at("en-de") == 1.0);
        REQUIRE(res.mean.has_value());
        CHECK(*res.mean == 1.0);
        CHECK(res.undefined_groups.empty());
    }

    SUBCASE("two groups with tau 1.0 and 0.0 average to 0.5") {
        // group a: perfectly concordant; group b: 3 concordant vs 3
        // discordant pairs, so tau is exactly 0
        const std::vector<double> s{1, 2, 1, 2, 3, 4};
        const std::vector<double> g{1, 2, 3, 1, 4, 2};
        const std::vector<std::string> keys{"a", "a", "b", "b", "b", "b"};
        auto res = grouped_correlation(s, g, keys, CorrelationMeasure::KendallTauB);
        CHECK(res.by_group.at("a") == 1.0);
        CHECK(res.by_group.at("b") == 0.0);
        REQUIRE(res.mean.has_value());
        CHECK(*res.mean == 0.5);
    }

    SUBCASE("size-1 groups are flagged undefined and excluded") {
        const std::vector<double> s{1, 1, 2};
        const std::vector<double> g{5, 1, 2};
        const std::vector<std::string> keys{"solo", "pair", "pair"};
        auto res = grouped_correlation(s, g, keys, CorrelationMeasure::KendallTauB);
        REQUIRE(res.undefined_groups.size() == 1);
        CHECK(res.undefined_groups[0] == "solo");
        CHECK(res.by_group.count("solo") == 0);
        REQUIRE(res.mean.has_value());
        CHECK(*res.mean == res.by_group.at("pair"));
    }

    SUBCASE("no defined group leaves the mean absent") {
        const std::vector<double> s{1, 1};
        const std::vector<double> g{1, 2};
        auto res = grouped_correlation(s, g, {"a", "a"}, CorrelationMeasure::KendallTauB);
        CHECK(!res.mean.has_value());
        CHECK(res.undefined_groups == std::vector<std::string>{"a"});
    }
}
