#pragma once

#include <span>
#include <string>
#include <vector>

#include "csweep/types.hpp"

namespace csweep {

// Per-pixel coefficients in a spectral basis. Plane-major like the cube:
// data[k * height * width + ...], k < dim.
struct CoefficientField {
  int height = 0;
  int width = 0;
  int dim = 0;
  std::vector<double> data;

  std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
  double* plane(int k) { return data.data() + static_cast<std::size_t>(k) * plane_size(); }
  const double* plane(int k) const { return data.data() + static_cast<std::size_t>(k) * plane_size(); }
};

// Top-dim right singular vectors of the pixel-by-spectrum matrix (uncentered
// principal components), orthonormal rows in decreasing singular-value order.
// Sign convention: the largest-magnitude entry of each row is positive
// (smallest index wins ties). Errors when the training spectra have rank < dim.
SpectralBasis compute_basis(std::span<const HyperspectralCube> training, int dim);
SpectralBasis compute_basis(const HyperspectralCube& training, int dim);

// z = B x per pixel; x = B^T z per pixel. Low-level forms run on raw
// plane-major buffers of hw pixels (also used on padded grids).
void project_planes(const double* cube_planes, std::size_t hw, const SpectralBasis&,
                    double* coeff_planes);
void lift_planes(const double* coeff_planes, std::size_t hw, const SpectralBasis&,
                 double* cube_planes);

CoefficientField project(const HyperspectralCube&, const SpectralBasis&);
HyperspectralCube lift(const CoefficientField&, const SpectralBasis&,
                       const std::vector<double>& wavelengths_nm);

// First ceil(dim / 2) rows. dim 1 is an error.
SpectralBasis halve_basis(const SpectralBasis&);

// CSV: header "dim,channels", then one row per basis vector with entries
// printed at 17 significant digits (doubles survive round-trips exactly).
void write_basis_csv(const std::string& path, const SpectralBasis&);
SpectralBasis read_basis_csv(const std::string& path);

}  // namespace csweep
