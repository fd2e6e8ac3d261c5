#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "metricfuse/preprocess.hpp"
#include "test_util.hpp"

using namespace metricfuse;
using testutil::make_record;

namespace {
const MetricSpec kMetricXLike("MetricX", 0.0, 25.0, true, true);
const MetricSpec kCometLike("COMET", 0.0, 1.0, false, true);
}  // namespace

TEST_CASE("clip saturates at the spec bounds") {
    CHECK(clip(-3.0, kMetricXLike) == 0.0);
    CHECK(clip(5.0, kMetricXLike) == 5.0);
    CHECK(clip(30.0, kMetricXLike) == 25.0);

    CHECK_THROWS_AS(clip(std::nan(""), kMetricXLike), DataError);
    CHECK_THROWS_AS(clip(std::numeric_limits<double>::infinity(), kMetricXLike), DataError);
    CHECK_THROWS_AS(clip(-std::numeric_limits<double>::infinity(), kMetricXLike), DataError);
}

TEST_CASE("normalize maps the clip range onto [0,1]") {
    CHECK(normalize(5.0, kMetricXLike) == 0.2);
    CHECK(normalize(kMetricXLike.clip_min, kMetricXLike) == 0.0);
    CHECK(normalize(kMetricXLike.clip_max, kMetricXLike) == 1.0);
    CHECK_THROWS_AS(normalize(-0.1, kMetricXLike), std::invalid_argument);
    CHECK_THROWS_AS(normalize(25.1, kMetricXLike), std::invalid_argument);
}

TEST_CASE("inversion flips the normalized scale") {
    CHECK(invert_score(0.2, kMetricXLike) == 0.8);
    CHECK(invert_score(0.2, kCometLike) == 0.2);
    CHECK(invert_score(1.0, kMetricXLike) == 0.0);
    CHECK_THROWS_AS(invert_score(1.1, kMetricXLike), std::invalid_argument);
    CHECK_THROWS_AS(invert_score(-0.1, kMetricXLike), std::invalid_argument);
}

TEST_CASE("preprocess_matrix composes the pipeline and preserves order") {
    SUBCASE("single inverted metric") {
        auto rec = make_record("en-de", "sysA", "s1", 0.4, {{"MetricX", 5.0}});
        auto m = preprocess_matrix({rec}, {kMetricXLike});
        REQUIRE(m.rows.size() == 1);
        CHECK(m.rows[0][0] == 0.8);
        CHECK(m.metric_order == std::vector<std::string>{"MetricX"});
        CHECK(m.row_keys[0] == rec.key());
    }

    SUBCASE("identity pipeline for an in-range [0,1] metric") {
        auto rec = make_record("en-de", "sysA", "s1", 0.4, {{"COMET", 0.7}});
        auto m = preprocess_matrix({rec}, {kCometLike});
        CHECK(m.rows[0][0] == 0.7);
    }

    SUBCASE("two records, two metrics: shape follows the inputs") {
        auto r1 = make_record("en-de", "sysA", "s1", 0.1, {{"MetricX", 5.0}, {"COMET", 0.7}});
        auto r2 = make_record("en-de", "sysA", "s2", 0.2, {{"MetricX", 20.0}, {"COMET", 0.3}});
        auto m = preprocess_matrix({r1, r2}, {kCometLike, kMetricXLike});
        REQUIRE(m.rows.size() == 2);
        REQUIRE(m.rows[0].size() == 2);
        CHECK(m.metric_order == std::vector<std::string>{"COMET", "MetricX"});
        CHECK(m.rows[0][0] == 0.7);
        CHECK(m.rows[0][1] == 0.8);
        CHECK(m.rows[1][0] == 0.3);
        CHECK(m.rows[1][1] == 1.0 - 20.0 / 25.0);
    }

    SUBCASE("missing score names the record and the metric") {
        auto rec = make_record("en-de", "sysA", "s1", 0.4, {{"COMET", 0.7}});
        CHECK_THROWS_WITH_AS(preprocess_matrix({rec}, {kCometLike, kMetricXLike}),
                             "record en-de/sysA/s1: missing score for metric 'MetricX'",
                             DataError);
    }
}

TEST_CASE("pipeline properties hold on randomized inputs") {
    std::mt19937_64 rng(20240901);
    for (int i = 0; i < 10000; ++i) {
        const double lo = -10.0 + 20.0 * testutil::uniform01(rng);
        const double hi = lo + 0.1 + 30.0 * testutil::uniform01(rng);
        const bool inv = (rng() & 1) != 0;
        const MetricSpec spec("m", lo, hi, inv, true);
        const double raw = -50.0 + 100.0 * testutil::uniform01(rng);

        const double value = preprocess_score(raw, spec);
        CHECK(value >= 0.0);
        CHECK(value <= 1.0);

        // clip is idempotent
        CHECK(clip(clip(raw, spec), spec) == clip(raw, spec));

        // monotone: non-decreasing without inversion, non-increasing with it
        const double raw2 = raw + testutil::uniform01(rng) * 10.0;
        const double value2 = preprocess_score(raw2, spec);
        if (inv) {
            CHECK(value2 <= value);
        } else {
            CHECK(value2 >= value);
        }
    }

    // identity on already-normalized values when the range is [0,1] and
    // no inversion applies
    const MetricSpec unit("m", 0.0, 1.0, false, true);
    for (int i = 0; i < 10000; ++i) {
        const double y = testutil::uniform01(rng);
        CHECK(preprocess_score(y, unit) == y);
    }
}
