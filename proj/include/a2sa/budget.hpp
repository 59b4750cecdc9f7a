#pragma once

#include <chrono>
#include <cstdint>
#include <string>

#include "a2sa/errors.hpp"

namespace a2sa {

// Per-piece resource budget. Wall-clock checks are cooperative: callers
// invoke check_time() at phase boundaries and DP-row granularity. The byte
// cap is advisory and consulted before large allocations.
class ResourceBudget {
public:
    static constexpr double kDefaultSeconds = 600.0;
    static constexpr std::uint64_t kDefaultBytes = 32ull << 30; // 32 GiB

    ResourceBudget(double max_seconds = kDefaultSeconds,
                   std::uint64_t max_bytes = kDefaultBytes)
        : max_seconds_(max_seconds),
          max_bytes_(max_bytes),
          start_(std::chrono::steady_clock::now()) {}

    double elapsed_seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    void check_time(const char* phase) const {
        if (elapsed_seconds() > max_seconds_)
            raise(errc::resource_budget_exceeded,
                  std::string("time budget exceeded during ") + phase);
    }

    void check_allocation(std::uint64_t bytes, const char* what) const {
        if (bytes > max_bytes_)
            raise(errc::resource_budget_exceeded,
                  std::string("allocation of ") + std::to_string(bytes) + " bytes for " + what +
                      " exceeds the byte budget");
    }

    double max_seconds() const { return max_seconds_; }
    std::uint64_t max_bytes() const { return max_bytes_; }

private:
    double max_seconds_;
    std::uint64_t max_bytes_;
    std::chrono::steady_clock::time_point start_;
};

} // namespace a2sa
