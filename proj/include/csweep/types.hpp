#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace csweep {

// Scene radiance sampled on a spectral grid. Plane-major storage:
// data[c * height * width + r * width + col], channels in wavelength order.
struct HyperspectralCube {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> wavelengths_nm;  // ascending, one per channel
  std::vector<double> data;

  std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
  double* plane(int c) { return data.data() + static_cast<std::size_t>(c) * plane_size(); }
  const double* plane(int c) const { return data.data() + static_cast<std::size_t>(c) * plane_size(); }
  double& at(int c, int r, int col) { return data[(static_cast<std::size_t>(c) * height + r) * width + col]; }
  double at(int c, int r, int col) const { return data[(static_cast<std::size_t>(c) * height + r) * width + col]; }
};

// Grayscale exposures captured at distinct rear-lens positions, one plane per
// exposure in capture order. data[i * height * width + ...].
struct FocalStack {
  int height = 0;
  int width = 0;
  int count = 0;
  std::vector<double> lens_positions_mm;  // strictly increasing, one per plane
  std::vector<double> data;

  std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
  double* plane(int i) { return data.data() + static_cast<std::size_t>(i) * plane_size(); }
  const double* plane(int i) const { return data.data() + static_cast<std::size_t>(i) * plane_size(); }
  double& at(int i, int r, int col) { return data[(static_cast<std::size_t>(i) * height + r) * width + col]; }
  double at(int i, int r, int col) const { return data[(static_cast<std::size_t>(i) * height + r) * width + col]; }
};

// Blur kernel bank indexed by (lens position, wavelength). Each kernel is a
// row-major kernel_size x kernel_size plane, normalized to unit sum.
// kernels[((i * channels) + j) * kernel_size^2 + ...].
struct PsfStack {
  int count = 0;        // lens positions
  int channels = 0;     // wavelengths
  int kernel_size = 0;  // odd
  std::vector<double> lens_positions_mm;
  std::vector<double> wavelengths_nm;
  std::vector<double> kernels;

  std::size_t kernel_area() const { return static_cast<std::size_t>(kernel_size) * kernel_size; }
  double* kernel(int i, int j) {
    return kernels.data() + (static_cast<std::size_t>(i) * channels + j) * kernel_area();
  }
  const double* kernel(int i, int j) const {
    return kernels.data() + (static_cast<std::size_t>(i) * channels + j) * kernel_area();
  }
};

// Orthonormal spectral basis, one basis vector per row. Row-major:
// rows[k * channels + j].
struct SpectralBasis {
  int dim = 0;       // number of basis vectors (v)
  int channels = 0;  // spectral samples per vector (c)
  std::vector<double> rows;

  double& at(int k, int j) { return rows[static_cast<std::size_t>(k) * channels + j]; }
  double at(int k, int j) const { return rows[static_cast<std::size_t>(k) * channels + j]; }
  const double* row(int k) const { return rows.data() + static_cast<std::size_t>(k) * channels; }
};

// Tabulated per-wavelength system response in [0, 1].
struct SpectralResponse {
  std::vector<double> wavelengths_nm;  // ascending
  std::vector<double> response;
};

// Planar RGB image, data[p * height * width + ...] for p in {R, G, B}.
struct RgbImage {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
  double* plane(int p) { return data.data() + static_cast<std::size_t>(p) * plane_size(); }
  const double* plane(int p) const { return data.data() + static_cast<std::size_t>(p) * plane_size(); }
};

struct ValidationReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
  std::string str() const;  // newline-joined issue list
};

// Structural checks. Pure: no mutation, identical reports on repeated calls.
ValidationReport validate(const HyperspectralCube&);
ValidationReport validate(const FocalStack&);
ValidationReport validate(const PsfStack&);
ValidationReport validate(const SpectralBasis&);
ValidationReport validate(const SpectralResponse&);

// Throws std::invalid_argument("<what>: <issues>") when the report is not ok.
void require_valid(const ValidationReport& report, const char* what);

// Linear interpolation of a response curve onto a target wavelength grid.
// Every target must lie inside the tabulated range; no extrapolation.
std::vector<double> resample_response(const SpectralResponse&, const std::vector<double>& wavelengths_nm);

}  // namespace csweep
