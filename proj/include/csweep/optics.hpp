#pragma once

#include <string>
#include <vector>

#include "csweep/types.hpp"

namespace csweep {

// Tabulated focal length versus wavelength for one lens element.
struct LensDispersion {
  std::vector<double> wavelengths_nm;   // ascending
  std::vector<double> focal_lengths_mm; // positive, finite

  // Linear interpolation; wavelengths outside the table are an error.
  double focal_length_at(double wavelength_nm) const;
};

// CSV with a header line followed by "wavelength_nm,focal_length_mm" rows.
LensDispersion read_dispersion_csv(const std::string& path);

struct OpticalConfig {
  LensDispersion lens1;
  LensDispersion lens2;
  double separation_mm = 0.0;           // axial gap between the two elements
  double aperture_number = 8.0;         // f-number at the reference wavelength
  double pixel_pitch_um = 5.86;
  double scene_distance_m = 2.8;
  double reference_wavelength_nm = 550.0;
  int max_kernel_px = 63;               // rejection bound for synthesized kernels
};

// Thin-lens pair in air: 1/f = 1/f1 + 1/f2 - d/(f1*f2). Errors when the
// combined power is not positive.
double combined_focal_length(double f1_mm, double f2_mm, double separation_mm);

// Back focal shift relative to the reference wavelength, one entry per input
// wavelength (f(lambda) - f(lambda_ref) of the combined pair).
std::vector<double> focal_shift_curve(const OpticalConfig&, const std::vector<double>& wavelengths_nm);

// Rear-lens sweep positions: `count` values equally spaced across the closed
// span of the shift curve; a single position sits at the midpoint. A constant
// curve with count > 1 is an error (no spectral encoding to sweep over).
std::vector<double> select_lens_positions(const std::vector<double>& shift_curve_mm, int count);

// 2 N c s^2 / f^2 with N the aperture number, c the circle of confusion,
// s the subject distance and f the focal length (all lengths in meters).
double depth_of_field(double aperture_number, double coc_m, double subject_distance_m,
                      double focal_length_m);

// Blur-circle growth in pixels per millimetre of axial defocus, from the
// aperture radius and image distance at the reference wavelength.
double defocus_blur_rate(const OpticalConfig&);

// Single blur kernel (row-major kernel_size x kernel_size, unit sum): a
// supersampled disk of radius blur_rate * |shift - lens_position|, smoothed by
// a narrow Gaussian. Exactly in-focus kernels degenerate to a delta.
std::vector<double> synthesize_psf(const OpticalConfig&, double wavelength_nm,
                                   double lens_position_mm, int kernel_size);

// Kernel bank over a position/wavelength grid at the smallest common odd size
// that contains every disk. Errors when that size exceeds max_kernel_px.
PsfStack build_psf_stack(const OpticalConfig&, const std::vector<double>& lens_positions_mm,
                         const std::vector<double>& wavelengths_nm);

}  // namespace csweep
