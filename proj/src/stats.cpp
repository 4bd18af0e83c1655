#include "rfdop/stats.hpp"

#include <cmath>

#include "rfdop/error.hpp"

namespace rfdop::stats {

Moments moments(std::span<const double> values) {
    Moments m;
    m.count = values.size();
    if (values.empty()) return m;
    double sum = 0.0;
    double sq = 0.0;
    for (double v : values) {
        sum += v;
        sq += v * v;
    }
    m.mean = sum / static_cast<double>(m.count);
    m.mse = sq / static_cast<double>(m.count);
    if (m.count > 1) {
        double acc = 0.0;
        for (double v : values) acc += (v - m.mean) * (v - m.mean);
        m.variance = acc / static_cast<double>(m.count - 1);
    }
    return m;
}

std::uint64_t binomial_quantile(std::uint64_t n, double p, double q) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial p must lie in [0, 1]");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
    if (p == 0.0) return 0;
    if (p == 1.0) return n;
    const double dn = static_cast<double>(n);
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    double cdf = 0.0;
    for (std::uint64_t k = 0; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        const double log_pmf =
            std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0) - std::lgamma(dn - dk + 1.0) + dk * log_p + (dn - dk) * log_q;
        cdf += std::exp(log_pmf);
        if (cdf >= q) return k;
    }
    return n;
}

CountInterval binomial_interval(std::uint64_t n, double p, double level) {
    const double tail = (1.0 - level) / 2.0;
    return CountInterval{binomial_quantile(n, p, tail), binomial_quantile(n, p, 1.0 - tail)};
}

}  // namespace rfdop::stats
