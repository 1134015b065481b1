#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace mlnum::bench {

// Invalid-config error naming the offending field; maps to exit code 2.
struct ConfigError : std::runtime_error {
    ConfigError(std::string field_name, const std::string& msg)
        : std::runtime_error("invalid config: field '" + field_name + "': " + msg),
          field(std::move(field_name)) {}
    std::string field;
};

struct ExperimentConfig {
    std::string kind;
    std::string name;     // output file stem
    std::string out_dir;  // resolved output directory
    std::vector<std::uint64_t> seeds;
    nlohmann::json raw;   // full parsed config
    std::string hash;     // canonical content hash (out_dir excluded)
};

// Parses and validates the common envelope; kind-specific fields are
// validated by the experiment implementations.
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& default_out_dir);
ExperimentConfig load_config_file(const std::string& path, const std::string& default_out_dir);

// FNV-1a over the canonical (sorted-key) serialization with non-semantic
// fields removed; stable under key reordering and whitespace.
std::string config_hash(const nlohmann::json& j);

// Typed field access with ConfigError on absence/mistype.
template <class T>
T require_field(const nlohmann::json& j, const std::string& field) {
    if (!j.contains(field)) throw ConfigError(field, "missing required field");
    try {
        return j.at(field).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(field, "wrong type");
    }
}

template <class T>
T field_or(const nlohmann::json& j, const std::string& field, T fallback) {
    if (!j.contains(field)) return fallback;
    try {
        return j.at(field).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(field, "wrong type");
    }
}

}  // namespace mlnum::bench
