#include "camray/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace camray::parallel {

namespace {
std::atomic<int> g_threads{1};
}

void set_threads(int n) { g_threads.store(std::max(1, n)); }

int threads() { return g_threads.load(); }

int resolve_threads(int flag_value) {
    if (flag_value > 0) {
        return flag_value;
    }
    if (const char *env = std::getenv("CAMRAY_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) {
                return n;
            }
        } catch (const std::exception &) {
        }
    }
    return 1;
}

void for_rows(int rows, const std::function<void(int)> &fn) {
    const int n = std::min(threads(), rows);
    if (n <= 1) {
        for (int r = 0; r < rows; ++r) {
            fn(r);
        }
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (int w = 0; w < n; ++w) {
        const int begin = rows * w / n;
        const int end = rows * (w + 1) / n;
        pool.emplace_back([&, begin, end] {
            try {
                for (int r = begin; r < end; ++r) {
                    fn(r);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace camray::parallel
