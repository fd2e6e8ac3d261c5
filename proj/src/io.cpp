#include "metricfuse/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace metricfuse {

using nlohmann::json;

namespace {

std::string located(const std::string& source, std::size_t line, const std::string& msg) {
    return source + ":" + std::to_string(line) + ": " + msg;
}

std::string require_string(const json& j, const char* field, const std::string& source,
                           std::size_t line) {
    auto it = j.find(field);
    if (it == j.end()) {
        throw DataError(located(source, line, std::string("missing required field '") + field + "'"));
    }
    if (!it->is_string()) {
        throw DataError(located(source, line, std::string("field '") + field + "' must be a string"));
    }
    return it->get<std::string>();
}

SegmentRecord parse_record(const json& j, const std::string& source, std::size_t line,
                           bool flip_gold) {
    if (!j.is_object()) {
        throw DataError(located(source, line, "record must be a JSON object"));
    }
    SegmentRecord rec;
    rec.lang_pair = require_string(j, "lang_pair", source, line);
    rec.system_id = require_string(j, "system_id", source, line);
    rec.segment_id = require_string(j, "segment_id", source, line);

    if (auto it = j.find("domain"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) {
            throw DataError(located(source, line, "field 'domain' must be a string"));
        }
        rec.domain = it->get<std::string>();
    }
    if (auto it = j.find("has_reference"); it != j.end() && !it->is_null()) {
        if (!it->is_boolean()) {
            throw DataError(located(source, line, "field 'has_reference' must be a boolean"));
        }
        rec.has_reference = it->get<bool>();
    }
    if (auto it = j.find("human_score"); it != j.end() && !it->is_null()) {
        if (!it->is_number()) {
            throw DataError(located(source, line, "field 'human_score' must be a number"));
        }
        const double g = it->get<double>();
        rec.human_score = flip_gold ? -g : g;
    }
    if (auto it = j.find("scores"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) {
            throw DataError(located(source, line, "field 'scores' must be an object"));
        }
        for (const auto& [name, value] : it->items()) {
            if (value.is_null()) continue;  // explicitly absent
            if (!value.is_number()) {
                throw DataError(
                    located(source, line, "score for metric '" + name + "' must be a number"));
            }
            rec.raw_scores[name] = value.get<double>();
        }
    }
    return rec;
}

}  // namespace

std::vector<SegmentRecord> parse_dataset(std::istream& in, const std::string& source_name,
                                         bool flip_gold) {
    std::vector<SegmentRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(located(source_name, line_no, e.what()));
        }
        records.push_back(parse_record(j, source_name, line_no, flip_gold));
    }
    return records;
}

std::vector<SegmentRecord> read_dataset(const std::filesystem::path& path, bool flip_gold) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open dataset file '" + path.string() + "'");
    }
    return parse_dataset(in, path.filename().string(), flip_gold);
}

namespace {

struct ParsedMetric {
    MetricSpec spec;
    std::optional<double> weight;
};

ParsedMetric parse_metric_entry(const json& j, const std::string& source) {
    if (!j.is_object()) {
        throw DataError(source + ": metric entry must be an object");
    }
    auto name_it = j.find("name");
    if (name_it == j.end() || !name_it->is_string()) {
        throw DataError(source + ": metric entry needs a string 'name'");
    }
    const std::string name = name_it->get<std::string>();

    auto clip_it = j.find("clip");
    if (clip_it == j.end() || !clip_it->is_array() || clip_it->size() != 2 ||
        !(*clip_it)[0].is_number() || !(*clip_it)[1].is_number()) {
        throw DataError(source + ": metric '" + name + "' needs 'clip': [min, max]");
    }
    if (auto it = j.find("normalize"); it != j.end() && !(it->is_boolean() && it->get<bool>())) {
        throw DataError(source + ": metric '" + name + "': 'normalize' must be true");
    }
    const bool invert = j.value("invert", false);
    const bool needs_reference = j.value("needs_reference", true);

    std::optional<double> weight;
    if (auto it = j.find("weight"); it != j.end() && !it->is_null()) {
        if (!it->is_number()) {
            throw DataError(source + ": metric '" + name + "': 'weight' must be a number");
        }
        weight = it->get<double>();
    }
    try {
        return ParsedMetric{MetricSpec(name, (*clip_it)[0].get<double>(),
                                       (*clip_it)[1].get<double>(), invert, needs_reference),
                            weight};
    } catch (const std::invalid_argument& e) {
        throw DataError(source + ": " + e.what());
    }
}

// Parses the {metrics, per_lang, qe_fallback} shape shared by the top-level
// config and the fallback section.
CompositeConfig parse_composite(const json& j, const std::string& source) {
    auto metrics_it = j.find("metrics");
    if (metrics_it == j.end() || !metrics_it->is_array() || metrics_it->empty()) {
        throw DataError(source + ": needs a non-empty 'metrics' array");
    }
    std::vector<MetricSpec> specs;
    std::vector<double> weights;
    for (const auto& entry : *metrics_it) {
        ParsedMetric m = parse_metric_entry(entry, source);
        if (!m.weight.has_value()) {
            throw DataError(source + ": metric '" + m.spec.name + "' is missing its 'weight'");
        }
        specs.push_back(std::move(m.spec));
        weights.push_back(*m.weight);
    }

    std::map<std::string, std::vector<double>> per_lang;
    if (auto it = j.find("per_lang"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) {
            throw DataError(source + ": 'per_lang' must be an object");
        }
        for (const auto& [pair, vec] : it->items()) {
            if (!vec.is_array()) {
                throw DataError(source + ": per_lang entry '" + pair + "' must be an array");
            }
            std::vector<double> w;
            for (const auto& v : vec) {
                if (!v.is_number()) {
                    throw DataError(source + ": per_lang entry '" + pair +
                                    "' must contain numbers");
                }
                w.push_back(v.get<double>());
            }
            per_lang.emplace(pair, std::move(w));
        }
    }

    std::shared_ptr<const CompositeConfig> fallback;
    if (auto it = j.find("qe_fallback"); it != j.end() && !it->is_null()) {
        fallback = std::make_shared<const CompositeConfig>(
            parse_composite(*it, source + " (qe_fallback)"));
    }

    try {
        return CompositeConfig(std::move(specs), std::move(weights), std::move(per_lang),
                               std::move(fallback));
    } catch (const std::invalid_argument& e) {
        throw DataError(source + ": " + e.what());
    }
}

json composite_to_json(const CompositeConfig& config) {
    json j;
    json metrics = json::array();
    for (std::size_t i = 0; i < config.specs.size(); ++i) {
        const auto& s = config.specs[i];
        metrics.push_back({{"name", s.name},
                           {"clip", {s.clip_min, s.clip_max}},
                           {"normalize", true},
                           {"invert", s.invert},
                           {"needs_reference", s.needs_reference},
                           {"weight", config.weights[i]}});
    }
    j["metrics"] = std::move(metrics);
    if (!config.per_lang.empty()) {
        j["per_lang"] = config.per_lang;
    }
    if (config.qe_fallback) {
        j["qe_fallback"] = composite_to_json(*config.qe_fallback);
    }
    return j;
}

}  // namespace

bool operator==(const ConfigDocument& a, const ConfigDocument& b) {
    return a.mode == b.mode && a.config == b.config && a.provenance == b.provenance;
}

ConfigDocument parse_config(const std::string& text, const std::string& source_name) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(source_name + ": " + e.what());
    }
    if (!j.is_object()) {
        throw DataError(source_name + ": config must be a JSON object");
    }
    std::string mode = j.value("mode", "ref");
    if (mode != "ref" && mode != "qe") {
        throw DataError(source_name + ": 'mode' must be \"ref\" or \"qe\"");
    }
    json provenance;
    if (auto it = j.find("provenance"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) {
            throw DataError(source_name + ": 'provenance' must be an object");
        }
        provenance = *it;
    }
    return ConfigDocument{std::move(mode), parse_composite(j, source_name),
                          std::move(provenance)};
}

ConfigDocument read_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open config file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.filename().string());
}

std::string serialize_config(const ConfigDocument& doc) {
    json j = composite_to_json(doc.config);
    j["mode"] = doc.mode;
    if (!doc.provenance.is_null()) {
        j["provenance"] = doc.provenance;
    }
    return j.dump(2) + "\n";
}

std::vector<MetricSpec> read_metric_specs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open metrics file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string source = path.filename().string();
    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw DataError(source + ": " + e.what());
    }
    auto metrics_it = j.find("metrics");
    if (!j.is_object() || metrics_it == j.end() || !metrics_it->is_array() ||
        metrics_it->empty()) {
        throw DataError(source + ": needs a non-empty 'metrics' array");
    }
    std::vector<MetricSpec> specs;
    for (const auto& entry : *metrics_it) {
        specs.push_back(parse_metric_entry(entry, source).spec);
    }
    try {
        require_unique_names(specs);
    } catch (const std::invalid_argument& e) {
        throw DataError(source + ": " + e.what());
    }
    return specs;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError("cannot write to '" + tmp.string() + "'");
        }
        out << content;
        if (!out.good()) {
            throw DataError("failed writing '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace metricfuse
