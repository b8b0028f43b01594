#include "csweep/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <vector>

namespace csweep {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft2D::Fft2D(int rows, int cols) : rows_(rows), cols_(cols), fwd_(nullptr), inv_(nullptr) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("Fft2D: grid dimensions must be positive");
  std::vector<std::complex<double>> a(size()), b(size());
  auto* pa = reinterpret_cast<fftw_complex*>(a.data());
  auto* pb = reinterpret_cast<fftw_complex*>(b.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  // FFTW_UNALIGNED so the plans accept any caller buffer later
  fwd_ = fftw_plan_dft_2d(rows, cols, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  inv_ = fftw_plan_dft_2d(rows, cols, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!fwd_ || !inv_) throw std::runtime_error("Fft2D: plan creation failed");
}

Fft2D::~Fft2D() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (inv_) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void Fft2D::forward(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(fwd_),
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void Fft2D::inverse(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(inv_),
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
  const double scale = 1.0 / static_cast<double>(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] *= scale;
}

}  // namespace csweep
