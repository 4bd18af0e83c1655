#pragma once

namespace rfdop {

// Inverse error function on (-1, 1). erf(erf_inv(y)) == y to <= 1e-12 relative.
// Throws DomainError for |y| >= 1 or NaN.
double erf_inv(double y);

// Gaussian tail Q(x) = 0.5 * erfc(x / sqrt(2)).
double q_function(double x) noexcept;

}  // namespace rfdop
