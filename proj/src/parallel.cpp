#include "pirsim/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace pirsim {

std::size_t thread_budget() {
    if (const char* env = std::getenv("PIR_SIM_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 0)
            throw std::invalid_argument("PIR_SIM_THREADS must be a nonnegative integer");
        if (v > 0) return std::size_t(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

void parallel_chunks(std::size_t total, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
    if (total == 0) return;
    if (chunk == 0) throw std::invalid_argument("parallel: chunk size must be positive");
    const std::size_t num_chunks = (total + chunk - 1) / chunk;
    std::size_t workers = std::min(thread_budget(), num_chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < num_chunks; ++c)
            fn(c * chunk, std::min(total, (c + 1) * chunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&]() {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= num_chunks) return;
            try {
                fn(c * chunk, std::min(total, (c + 1) * chunk));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace pirsim
