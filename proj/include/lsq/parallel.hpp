// parallel.hpp — index-parallel map over independent tasks, capped by LSQ_THREADS

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace lsq {

// Worker count: LSQ_THREADS if set to a positive integer, else hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("LSQ_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Evaluates fn(i) for i in [0, n). Results are stored by index so the output does not depend
// on scheduling. The first exception thrown by any task is rethrown.
template <class T>
std::vector<T> parallel_map(int n, const std::function<T(int)>& fn) {
    std::vector<T> out(static_cast<std::size_t>(std::max(n, 0)));
    const int workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

} // namespace lsq
