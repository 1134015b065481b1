#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mlnum::bench {

struct ExperimentInfo {
    std::string kind;
    std::string description;
    std::string topic;
};

// Fixed registry of runnable experiment kinds; listing order is stable.
const std::vector<ExperimentInfo>& experiment_registry();
bool is_known_experiment(std::string_view kind);
std::string registry_listing();

}  // namespace mlnum::bench
