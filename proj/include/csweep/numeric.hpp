#pragma once

#include <cstddef>
#include <span>

namespace csweep {

// Pairwise (cascade) summation with a fixed association order, so reductions
// give the same result regardless of thread count or scheduling.
double pairwise_sum(std::span<const double> values);
double sum_squares(std::span<const double> values);
double dot(std::span<const double> a, std::span<const double> b);

double l2_norm(std::span<const double> values);
double max_abs(std::span<const double> values);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> values);

}  // namespace csweep
