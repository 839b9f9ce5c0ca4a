#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bootgrid {

/// Splits [0, count) into `threads` contiguous blocks and calls
/// body(begin, end) for each block on its own thread. Results must be
/// combined by the caller in an order-independent way (integer sums).
/// The first exception thrown by any block is rethrown here.
template <class Body>
void parallel_blocks(std::int64_t count, int threads, Body&& body) {
    const std::int64_t workers = std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(count, 1));
    if (workers == 1) {
        body(std::int64_t{0}, count);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::int64_t w = 0; w < workers; ++w) {
        const std::int64_t begin = count * w / workers, end = count * (w + 1) / workers;
        pool.emplace_back([&, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    pool.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace bootgrid
