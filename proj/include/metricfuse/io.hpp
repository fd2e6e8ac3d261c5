#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "metricfuse/types.hpp"

namespace metricfuse {

inline constexpr const char* kToolVersion = "0.1.0";

// Line-delimited dataset: one JSON object per line with fields lang_pair,
// system_id, segment_id (required), domain, has_reference (default true),
// human_score, and scores (metric name -> number; null means absent).
// Unknown fields are ignored. A malformed line is an error carrying its
// line number, never a silent skip. flip_gold negates human_score at
// ingestion, for gold scales where lower means better.
std::vector<SegmentRecord> parse_dataset(std::istream& in, const std::string& source_name,
                                         bool flip_gold);
std::vector<SegmentRecord> read_dataset(const std::filesystem::path& path, bool flip_gold);

// Calibrated configuration document: mode, the composite (metrics with
// clip/invert/needs_reference/weight, optional per_lang table, optional
// qe_fallback of identical shape), and an opaque provenance block.
struct ConfigDocument {
    std::string mode;  // "ref" | "qe"
    CompositeConfig config;
    nlohmann::json provenance;  // object, or null when absent
};

bool operator==(const ConfigDocument& a, const ConfigDocument& b);

ConfigDocument parse_config(const std::string& text, const std::string& source_name);
ConfigDocument read_config(const std::filesystem::path& path);

// Canonical serialization: sorted keys, full-precision numbers, trailing
// newline. parse -> serialize is idempotent on the canonical form.
std::string serialize_config(const ConfigDocument& doc);

// Metric declaration file: same shape as a config but the per-metric
// weight is optional and ignored.
std::vector<MetricSpec> read_metric_specs(const std::filesystem::path& path);

// Write-temp-then-rename; the destination never holds partial content.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace metricfuse
