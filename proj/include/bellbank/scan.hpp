// Order-preserving grid evaluation with a serial reference path and an
// OpenMP path. Cells are pure, so the two paths must agree exactly; tests and
// the benchmark target hold them side by side.

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace bellbank {

enum class ExecMode { Serial, Parallel };

// Worker count for ExecMode::Parallel: BELLBANK_THREADS when set to a positive
// integer, otherwise the available hardware parallelism.
int scan_thread_count();

// Evaluates fn(i) for i in [0, n) into the result slot i. The parallel path
// uses a static schedule so output assembly preserves grid order.
template <typename T>
std::vector<T> evaluate_cells(std::size_t n, const std::function<T(std::size_t)>& fn,
                              ExecMode mode);

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, ExecMode mode);

template <typename T>
std::vector<T> evaluate_cells(std::size_t n, const std::function<T(std::size_t)>& fn,
                              ExecMode mode) {
    std::vector<T> out(n);
    parallel_for(
        n, [&](std::size_t i) { out[i] = fn(i); }, mode);
    return out;
}

// Evenly spaced samples including both endpoints (a single sample sits at lo).
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace bellbank
