#include "mlnum/bench/config.hpp"

#include <fstream>

#include "mlnum/bench/registry.hpp"
#include "mlnum/core/philox.hpp"

namespace mlnum::bench {

std::string config_hash(const nlohmann::json& j) {
    nlohmann::json canon = j;
    canon.erase("out_dir");  // placement is not semantic
    const std::string dump = canon.dump();
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(dump)));
    return buf;
}

ExperimentConfig parse_config(const nlohmann::json& j, const std::string& default_out_dir) {
    if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
    ExperimentConfig cfg;
    cfg.kind = require_field<std::string>(j, "kind");
    if (!is_known_experiment(cfg.kind)) throw ConfigError("kind", "unknown experiment kind");
    cfg.name = field_or<std::string>(j, "name", cfg.kind);
    cfg.out_dir = field_or<std::string>(j, "out_dir", default_out_dir);
    cfg.seeds = field_or<std::vector<std::uint64_t>>(j, "seeds", {});
    if (cfg.seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
    cfg.raw = j;
    cfg.hash = config_hash(j);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path, const std::string& default_out_dir) {
    std::ifstream f(path);
    if (!f) throw ConfigError("<file>", "cannot open " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("<file>", std::string("JSON parse error: ") + e.what());
    }
    return parse_config(j, default_out_dir);
}

}  // namespace mlnum::bench
