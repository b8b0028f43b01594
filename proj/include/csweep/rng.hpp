#pragma once

#include <cstdint>

namespace csweep {

// Stateless counter-based generator: hashes (seed, stream, counter) to one
// double in (0, 1). Draws are independent of evaluation order, which keeps
// noise synthesis bit-identical under any parallel schedule.
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

// Quantile function of the standard normal distribution (Acklam's rational
// approximation polished with one Halley step).
double inverse_normal_cdf(double p);

// Poisson draw from a single uniform. CDF inversion below mean 10, rounded
// normal approximation clamped at zero above. Returns the count as a double.
double sample_poisson(double mean, double u);

}  // namespace csweep
