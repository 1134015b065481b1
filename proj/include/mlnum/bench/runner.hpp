#pragma once

#include <string>
#include <vector>

#include "mlnum/bench/config.hpp"
#include "mlnum/core/parallel.hpp"

namespace mlnum::bench {

enum class RunStatus : int { Ok = 0, InvalidConfig = 2, Diverged = 3 };

struct RunOutput {
    RunStatus status = RunStatus::Ok;
    std::vector<std::string> files;
    std::string message;
};

// Executes one experiment config: writes result CSVs plus one manifest per
// seeded run. Outputs are deterministic given (config, seed); timestamps are
// confined to the manifest. On divergence, partial outputs are kept and the
// status is Diverged.
RunOutput run_experiment(const ExperimentConfig& cfg, Exec exec = Exec::Parallel);

// Convenience wrapper mapping ConfigError to InvalidConfig.
RunOutput run_config_file(const std::string& path, const std::string& default_out_dir,
                          Exec exec = Exec::Parallel);

}  // namespace mlnum::bench
