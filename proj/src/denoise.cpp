#include "csweep/denoise.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace csweep {

namespace {

class IdentityDenoiser final : public Denoiser {
 public:
  void apply(double*, int, int, int) const override {}
};

class SoftThresholdDenoiser final : public Denoiser {
 public:
  explicit SoftThresholdDenoiser(double tau) : tau_(tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("soft threshold: tau must be non-negative");
  }

  void apply(double* planes, int channels, int height, int width) const override {
    const long long n = static_cast<long long>(channels) * height * width;
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < n; ++q) {
      double x = planes[q];
      double m = std::abs(x) - tau_;
      planes[q] = m > 0.0 ? (x < 0.0 ? -m : m) : 0.0;
    }
  }

 private:
  double tau_;
};

// Dual-ascent TV prox: p <- (p + t grad(div p - g / w)) / (1 + t |grad ...|),
// output g - w div p. Fixed iteration count, two-phase sweeps so the result
// is independent of thread scheduling.
class TvDenoiser final : public Denoiser {
 public:
  TvDenoiser(double weight, int iters) : w_(weight), iters_(iters) {
    if (!(weight > 0.0)) throw std::invalid_argument("tv denoiser: weight must be positive");
    if (iters < 1) throw std::invalid_argument("tv denoiser: iterations must be at least 1");
  }

  void apply(double* planes, int channels, int height, int width) const override {
    const std::size_t hw = static_cast<std::size_t>(height) * width;
    std::vector<double> p1(hw), p2(hw), div(hw);
    for (int c = 0; c < channels; ++c) {
      double* g = planes + static_cast<std::size_t>(c) * hw;
      std::fill(p1.begin(), p1.end(), 0.0);
      std::fill(p2.begin(), p2.end(), 0.0);
      const double tau = 0.25;
      for (int it = 0; it < iters_; ++it) {
#pragma omp parallel for schedule(static)
        for (long long q = 0; q < static_cast<long long>(hw); ++q) {
          int r = static_cast<int>(q / width), col = static_cast<int>(q % width);
          double d = 0.0;
          if (r < height - 1) d += p1[q];
          if (r > 0) d -= p1[q - width];
          if (col < width - 1) d += p2[q];
          if (col > 0) d -= p2[q - 1];
          div[q] = d - g[q] / w_;
        }
#pragma omp parallel for schedule(static)
        for (long long q = 0; q < static_cast<long long>(hw); ++q) {
          int r = static_cast<int>(q / width), col = static_cast<int>(q % width);
          double gx = (r < height - 1) ? div[q + width] - div[q] : 0.0;
          double gy = (col < width - 1) ? div[q + 1] - div[q] : 0.0;
          double mag = std::sqrt(gx * gx + gy * gy);
          double denom = 1.0 + tau * mag;
          p1[q] = (p1[q] + tau * gx) / denom;
          p2[q] = (p2[q] + tau * gy) / denom;
        }
      }
#pragma omp parallel for schedule(static)
      for (long long q = 0; q < static_cast<long long>(hw); ++q) {
        int r = static_cast<int>(q / width), col = static_cast<int>(q % width);
        double d = 0.0;
        if (r < height - 1) d += p1[q];
        if (r > 0) d -= p1[q - width];
        if (col < width - 1) d += p2[q];
        if (col > 0) d -= p2[q - 1];
        g[q] -= w_ * d;
      }
    }
  }

 private:
  double w_;
  int iters_;
};

}  // namespace

std::shared_ptr<const Denoiser> make_identity_denoiser() {
  return std::make_shared<IdentityDenoiser>();
}

std::shared_ptr<const Denoiser> make_soft_threshold_denoiser(double tau) {
  return std::make_shared<SoftThresholdDenoiser>(tau);
}

std::shared_ptr<const Denoiser> make_tv_denoiser(double weight, int inner_iterations) {
  return std::make_shared<TvDenoiser>(weight, inner_iterations);
}

}  // namespace csweep
