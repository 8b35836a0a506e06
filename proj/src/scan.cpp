#include "bellbank/scan.hpp"

#include <cstdlib>
#include <exception>
#include <mutex>

#include <omp.h>

namespace bellbank {

int scan_thread_count() {
    if (const char* env = std::getenv("BELLBANK_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    return omp_get_max_threads();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, ExecMode mode) {
    if (mode == ExecMode::Serial) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const int threads = scan_thread_count();

    // Exceptions may not unwind out of an OpenMP region; capture the first
    // one and rethrow after the loop joins.
    std::exception_ptr failure = nullptr;
    std::mutex failure_mutex;
#pragma omp parallel for num_threads(threads) schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out;
    out.reserve(n);
    if (n == 0) return out;
    if (n == 1) {
        out.push_back(lo);
        return out;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out.push_back(lo + step * static_cast<double>(i));
    out.back() = hi;
    return out;
}

}  // namespace bellbank
