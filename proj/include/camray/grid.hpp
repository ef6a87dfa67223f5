#pragma once

#include <cstdint>
#include <vector>

namespace camray {

/// Row-major H×W field with a per-cell validity mask.
template <typename T>
struct Grid {
    int width = 0;
    int height = 0;
    std::vector<T> data;
    std::vector<std::uint8_t> valid;

    Grid() = default;
    Grid(int w, int h, const T &fill = T{})
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill), valid(static_cast<size_t>(w) * h, 0) {}

    size_t index(int row, int col) const { return static_cast<size_t>(row) * width + col; }
    T &at(int row, int col) { return data[index(row, col)]; }
    const T &at(int row, int col) const { return data[index(row, col)]; }
    bool is_valid(int row, int col) const { return valid[index(row, col)] != 0; }

    size_t valid_count() const {
        size_t n = 0;
        for (auto v : valid) {
            n += v != 0;
        }
        return n;
    }
};

}  // namespace camray
