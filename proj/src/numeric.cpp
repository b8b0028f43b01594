#include "csweep/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace csweep {

namespace {

constexpr std::size_t kLeaf = 32;

double sum_rec(const double* p, std::size_t n) {
  if (n <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  std::size_t h = n / 2;
  return sum_rec(p, h) + sum_rec(p + h, n - h);
}

double sumsq_rec(const double* p, std::size_t n) {
  if (n <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p[i] * p[i];
    return s;
  }
  std::size_t h = n / 2;
  return sumsq_rec(p, h) + sumsq_rec(p + h, n - h);
}

double dot_rec(const double* a, const double* b, std::size_t n) {
  if (n <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
  }
  std::size_t h = n / 2;
  return dot_rec(a, b, h) + dot_rec(a + h, b + h, n - h);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return sum_rec(values.data(), values.size());
}

double sum_squares(std::span<const double> values) {
  return sumsq_rec(values.data(), values.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  return dot_rec(a.data(), b.data(), a.size());
}

double l2_norm(std::span<const double> values) {
  return std::sqrt(sum_squares(values));
}

double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

bool all_finite(std::span<const double> values) {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace csweep
