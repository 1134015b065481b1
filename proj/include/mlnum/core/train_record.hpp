#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlnum/core/csv.hpp"

namespace mlnum {

// Per-iteration training log shared by the solvers. `qoi` is the tracked
// quantity of interest (y0 estimate, mean cost, ...), named per export.
struct TrainRecord {
    struct Row {
        long step = 0;
        double loss = 0.0;
        double qoi = 0.0;
        double seconds = 0.0;  // wall clock since training start
        std::uint64_t seed = 0;
    };

    std::vector<Row> rows;
    bool diverged = false;
    long diverged_at = -1;

    void push(long step, double loss, double qoi, double seconds, std::uint64_t seed) {
        if (!rows.empty() && step <= rows.back().step)
            throw std::invalid_argument("TrainRecord steps must be strictly increasing");
        rows.push_back({step, loss, qoi, seconds, seed});
    }

    CsvWriter to_csv(const std::string& qoi_name) const {
        CsvWriter w({"step", "loss", qoi_name, "seconds", "seed"});
        for (const auto& r : rows) {
            w.add_row({std::to_string(r.step), format_real(r.loss), format_real(r.qoi),
                       format_real(r.seconds), std::to_string(r.seed)});
        }
        return w;
    }

    double final_loss() const { return rows.empty() ? 0.0 : rows.back().loss; }
    double final_qoi() const { return rows.empty() ? 0.0 : rows.back().qoi; }
};

}  // namespace mlnum
