#pragma once

#include <string>
#include <vector>

#include "intsense/config.hpp"

namespace intsense {

struct EvalRecord {
    std::string op_tag;    // "design", "pca", "identity"
    std::string image_id;
    int m_rank;
    double rsnr_integral;
    std::vector<std::pair<int, double>> rsnr_box;  // (k, dB)
    double estimate_time_s;
};

// CLI entry points; all throw on configuration errors and return the process
// exit code otherwise. Config keys are documented in the README.
int cmd_fit(const Config& cfg);
int cmd_design(const Config& cfg);
int cmd_evaluate(const Config& cfg);
int cmd_heatmap(const Config& cfg);
int cmd_selftest(const Config& cfg);

} // namespace intsense
