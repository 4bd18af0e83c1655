#include "rfdop/special.hpp"

#include <cmath>
#include <numbers>

#include "rfdop/error.hpp"

namespace rfdop {

namespace {

// Single-precision rational/polynomial guess (Giles 2010), good to ~1e-7.
double erf_inv_guess(double x) {
    double w = -std::log((1.0 - x) * (1.0 + x));
    double p;
    if (w < 5.0) {
        w -= 2.5;
        p = 2.81022636e-08;
        p = 3.43273939e-07 + p * w;
        p = -3.5233877e-06 + p * w;
        p = -4.39150654e-06 + p * w;
        p = 0.00021858087 + p * w;
        p = -0.00125372503 + p * w;
        p = -0.00417768164 + p * w;
        p = 0.246640727 + p * w;
        p = 1.50140941 + p * w;
    } else {
        w = std::sqrt(w) - 3.0;
        p = -0.000200214257;
        p = 0.000100950558 + p * w;
        p = 0.00134934322 + p * w;
        p = -0.00367342844 + p * w;
        p = 0.00573950773 + p * w;
        p = -0.0076224613 + p * w;
        p = 0.00943887047 + p * w;
        p = 1.00167406 + p * w;
        p = 2.83297682 + p * w;
    }
    return p * x;
}

}  // namespace

double erf_inv(double y) {
    if (!(y > -1.0 && y < 1.0)) throw DomainError("erf_inv: argument must lie in (-1, 1)");
    if (y == 0.0) return 0.0;
    const double a = std::fabs(y);
    const double tail = 1.0 - a;  // exact for a >= 0.5 (Sterbenz)

    double x = erf_inv_guess(a);
    // Halley refinement. Residual is formed from erfc in the tail so that it
    // keeps full relative precision as y -> 1.
    for (int it = 0; it < 4; ++it) {
        const double r = a < 0.5 ? std::erf(x) - a : tail - std::erfc(x);
        const double deriv = 2.0 * std::numbers::inv_sqrtpi * std::exp(-x * x);
        const double step = r / deriv;
        x -= step / (1.0 + x * step);
        if (std::fabs(step) <= 1e-16 * std::fabs(x)) break;
    }
    return y < 0 ? -x : x;
}

double q_function(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace rfdop
