#pragma once

#include "camray/json_io.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace camray::cli {

/// Lowercase hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path &path);

/// Run manifest written next to generated artifacts. Holds no timestamps or host data so that
/// repeated runs produce identical bytes.
struct Manifest {
    std::uint64_t seed = 0;
    std::vector<std::string> command;
    std::vector<std::filesystem::path> inputs;
    std::vector<std::string> outputs;

    json to_json() const;
    void write(const std::filesystem::path &path) const;
};

}  // namespace camray::cli
