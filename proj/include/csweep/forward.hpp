#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "csweep/types.hpp"

namespace csweep {

// Window of the padded circular-convolution grid kept as sensor output.
struct CropSpec {
  int padded_height = 0;
  int padded_width = 0;
  int out_height = 0;
  int out_width = 0;
  int row_offset = 0;
  int col_offset = 0;

  // Padded grid of a height x width scene under kernel_size blur, output
  // window centered: offset (kernel_size - 1) / 2 on both axes.
  static CropSpec centered(int height, int width, int kernel_size);
  // Keep the whole padded grid (offsets zero, output = padded size).
  static CropSpec full(int padded_height, int padded_width);

  bool is_full() const {
    return row_offset == 0 && col_offset == 0 && out_height == padded_height &&
           out_width == padded_width;
  }
};

void check_crop(const CropSpec&);

// Photon budget for one sweep. light_efficiency is the per-exposure
// transmission factor (already divided across the sweep).
struct ExposureModel {
  double photon_flux = 7.5e17;   // photons / (m^2 * s) over the sensed band
  double total_exposure_s = 5.0; // split evenly across the sweep
  double pixel_area_m2 = 3.434e-11;
  double light_efficiency = 0.196;
  std::uint64_t seed = 0;
};

struct LightEfficiency {
  double per_exposure = 1.0;  // product of component efficiencies / sweep length
  double effective = 1.0;     // summed over the sweep (= the product itself)
};

// Zero-pads every channel to (height + K - 1) x (width + K - 1) with the
// scene centered, so circular convolution never wraps scene content.
HyperspectralCube pad_cube(const HyperspectralCube&, int kernel_size);

// Optical transfer functions of all kernels on the padded grid, plane-major
// ((i * channels + j) planes). Kernels are embedded centered at the origin
// with wraparound: a centered delta maps to an all-ones plane.
std::vector<std::complex<double>> compute_otfs(const PsfStack&, int padded_height,
                                               int padded_width);

// y_i = crop( sum_j K(z_i, lambda_j) * x_j ), linear convolution realized on
// the zero-padded grid. Measurement planes carry the kernel bank's positions.
FocalStack apply_forward(const HyperspectralCube&, const PsfStack&, const CropSpec&);

// Exact adjoint of apply_forward under the standard inner product.
HyperspectralCube apply_adjoint(const FocalStack&, const PsfStack&, const CropSpec&);

// Per-exposure and summed throughput of a sweep whose light passes the given
// component efficiencies (each in (0, 1]) with exposure split measurement_count ways.
LightEfficiency light_efficiency(const std::vector<double>& component_efficiencies,
                                 int measurement_count);

// Clean forward projection followed by per-pixel Poisson photon noise at the
// model's photon budget, returned in normalized units (count / expected-scale).
// Optional response_weights scale each channel before projection.
FocalStack simulate_measurement(const HyperspectralCube&, const PsfStack&, const CropSpec&,
                                const ExposureModel&,
                                const std::vector<double>& response_weights = {});

}  // namespace csweep
