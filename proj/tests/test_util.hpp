#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "metricfuse/types.hpp"

namespace testutil {

// Uniform double in [0,1) from the raw engine output; keeps generated test
// data identical across platforms.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Random value on the lattice {0, 1/buckets, ..., (buckets-1)/buckets};
// coarse lattices force ties.
inline double lattice(std::mt19937_64& rng, int buckets) {
    return static_cast<double>(rng() % static_cast<std::uint64_t>(buckets)) /
           static_cast<double>(buckets);
}

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("metricfuse_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path file(const std::string& name) const { return path / name; }

    std::filesystem::path write(const std::string& name, const std::string& content) const {
        auto p = file(name);
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p;
    }
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline metricfuse::SegmentRecord make_record(const std::string& lang_pair,
                                             const std::string& system_id,
                                             const std::string& segment_id, double human_score,
                                             std::map<std::string, double> scores,
                                             bool has_reference = true) {
    metricfuse::SegmentRecord rec;
    rec.lang_pair = lang_pair;
    rec.system_id = system_id;
    rec.segment_id = segment_id;
    rec.has_reference = has_reference;
    rec.human_score = human_score;
    rec.raw_scores = std::move(scores);
    return rec;
}

}  // namespace testutil
