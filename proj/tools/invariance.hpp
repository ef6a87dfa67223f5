#pragma once

#include "camray/attention.hpp"
#include "camray/json_io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace camray::cli {

struct InvarianceRow {
    std::string name;
    double deviation = 0.0;
    double tolerance = 0.0;
    bool pass() const { return deviation <= tolerance; }
};

/// Scene used by the attend subcommand: `views` cameras sharing one lens, each tokenized into
/// rows × cols patches.
struct SuiteConfig {
    AttentionConfig attention;
    CameraModel camera = CameraModel::pinhole(90.0, 64, 48);
    int views = 2;
    int rows = 4;
    int cols = 4;
    int trials = 10;
};

SuiteConfig suite_config_from_json(const json &j);

/// Identity reduction, world-frame invariance, dense-oracle equivalence and zero-init no-op on
/// seeded random tokens. Throws UnsupportedModelError for encodings that cannot handle the lens.
std::vector<InvarianceRow> run_invariance_suite(const SuiteConfig &cfg, std::uint64_t seed);

}  // namespace camray::cli
