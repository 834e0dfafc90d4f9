#pragma once

#include <complex>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace kobgeo {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Curvature normalization of the conformal density: lambda_disk(0) = 1,
/// i.e. Gaussian curvature -4, so K_disk(0, r) = artanh(r).
inline constexpr double kCurvature = -4.0;

struct query_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_parameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline double sq(double x) { return x * x; }
inline double abs2(cplx z) { return z.real() * z.real() + z.imag() * z.imag(); }

inline cplx unit_dir(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Worker budget: KOBGEO_THREADS if set, else hardware concurrency.
inline unsigned thread_budget() {
    if (const char* env = std::getenv("KOBGEO_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1u : hc;
}

/// Partitions [0,n) into contiguous blocks, one per worker. Results must be
/// merged by the caller in block order so the outcome is schedule-independent.
inline void parallel_blocks(std::size_t n,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    unsigned workers = thread_budget();
    if (workers <= 1 || n < 2 * workers) {
        body(0, 0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + workers - 1) / workers;
    std::size_t block = 0;
    for (std::size_t lo = 0; lo < n; lo += chunk, ++block) {
        std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&body, block, lo, hi] { body(block, lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace kobgeo
