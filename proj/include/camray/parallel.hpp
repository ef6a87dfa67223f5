#pragma once

#include <functional>

namespace camray::parallel {

/// Process-wide worker count used by the per-row loops. Values < 1 are clamped to 1.
void set_threads(int n);
int threads();

/// Resolves the thread count from an explicit flag value (> 0) or the CAMRAY_THREADS
/// environment variable, falling back to 1.
int resolve_threads(int flag_value);

/// Calls fn(row) for every row in [0, rows). Rows are split into contiguous blocks, one per
/// worker. Callers must only write row-local state so results do not depend on the split.
void for_rows(int rows, const std::function<void(int)> &fn);

}  // namespace camray::parallel
