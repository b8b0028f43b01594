#pragma once

#include <complex>
#include <cstddef>

namespace csweep {

// RAII wrapper around a pair of complex 2D FFTW plans for one grid size.
// Plan creation/destruction is serialized internally (the FFTW planner is not
// thread-safe); execution on distinct buffers is safe from many threads.
class Fft2D {
 public:
  Fft2D(int rows, int cols);
  ~Fft2D();
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return static_cast<std::size_t>(rows_) * cols_; }

  void forward(const std::complex<double>* in, std::complex<double>* out) const;
  // Inverse transform including the 1/(rows*cols) normalization.
  void inverse(const std::complex<double>* in, std::complex<double>* out) const;

 private:
  int rows_;
  int cols_;
  void* fwd_;
  void* inv_;
};

}  // namespace csweep
