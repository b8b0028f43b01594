#pragma once

#include <optional>
#include <vector>

#include "csweep/types.hpp"

namespace csweep {

// Observer color-matching functions and an illuminant spectrum on a shared
// wavelength grid. The built-in table is the CIE 1931 2-degree observer with
// the D65 illuminant at 10 nm spacing, linearly interpolated between samples.
struct ColorMatch {
  std::vector<double> wavelengths_nm;
  std::vector<double> xbar, ybar, zbar;
  std::vector<double> illuminant;

  static const ColorMatch& cie1931_d65();
};

struct Lab {
  double l = 0.0, a = 0.0, b = 0.0;
};

// CIEDE2000 color difference (kL = kC = kH = 1), including the blue-region
// rotation term.
double ciede2000(const Lab& x, const Lab& y);

// 8-bit-free conversions used by the image metrics; sRGB values are in [0, 1].
Lab srgb_to_lab(double r, double g, double b);

// Tristimulus integration of a cube against the color match (trapezoid rule
// over the cube's wavelength grid), white-normalized per component. Output is
// 3 planes (X, Y, Z) of height*width.
std::vector<double> hsi_to_xyz(const HyperspectralCube&, const ColorMatch&);

// XYZ integration followed by the sRGB transfer (linear matrix, gamma,
// clamp to [0, 1]). A spectrally flat cube maps to a neutral gray.
RgbImage hsi_to_rgb(const HyperspectralCube&, const ColorMatch& = ColorMatch::cie1931_d65());

// 10 log10(peak^2 / MSE) over all voxels; +inf when the cubes are identical.
double psnr(const HyperspectralCube& recon, const HyperspectralCube& truth, double peak = 1.0);

// Mean SSIM over channels: 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
// K2 = 0.03, dynamic range 1, valid windows only. Errors when either spatial
// dimension is below the window size.
double ssim(const HyperspectralCube& recon, const HyperspectralCube& truth);

// Mean per-pixel spectral angle in degrees. Pixels where either spectrum has
// norm below 1e-8 are excluded; an empty selection yields 0.
double sam_degrees(const HyperspectralCube& recon, const HyperspectralCube& truth);

// Mean CIEDE2000 over pixels of the two cubes' sRGB renderings.
double delta_e00_mean(const HyperspectralCube& recon, const HyperspectralCube& truth,
                      const ColorMatch& = ColorMatch::cie1931_d65());

struct PatchRect {
  int row = 0, col = 0, height = 0, width = 0;
};

// Baseline color composite: three focal-stack planes stacked as R, G, B,
// optionally divided per channel by the mean over a white patch.
RgbImage compose_rgb_from_stack(const FocalStack&, int r_index, int g_index, int b_index,
                                const std::optional<PatchRect>& white_patch = std::nullopt);

}  // namespace csweep
