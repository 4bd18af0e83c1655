#pragma once

#include <cstdint>
#include <span>

namespace rfdop::stats {

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased (n - 1)
    double mse = 0.0;       // mean square about zero
    std::size_t count = 0;
};

// Two-pass moments of the values in index order (bitwise reproducible).
Moments moments(std::span<const double> values);

// Smallest k with P(X <= k) >= q for X ~ Binomial(n, p).
std::uint64_t binomial_quantile(std::uint64_t n, double p, double q);

struct CountInterval {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
};

// Central interval holding `level` of the Binomial(n, p) mass.
CountInterval binomial_interval(std::uint64_t n, double p, double level);

}  // namespace rfdop::stats
