#include "csweep/basis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace csweep {

SpectralBasis compute_basis(std::span<const HyperspectralCube> training, int dim) {
  if (training.empty()) throw std::invalid_argument("compute_basis: no training cubes");
  const int C = training[0].channels;
  if (dim < 1 || dim > C)
    throw std::invalid_argument("compute_basis: dim must be in [1, channels]");
  for (const auto& cube : training) {
    require_valid(validate(cube), "compute_basis");
    if (cube.channels != C || cube.wavelengths_nm != training[0].wavelengths_nm)
      throw std::invalid_argument("compute_basis: training cubes have mismatched spectral grids");
  }

  // Gram matrix of the spectra; its top eigenvectors are the right singular
  // vectors of the (pixels x channels) sample matrix.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(C, C);
  for (const auto& cube : training) {
    const auto hw = static_cast<Eigen::Index>(cube.plane_size());
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> X(
        cube.data.data(), C, hw);
    gram.noalias() += X * X.transpose();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("compute_basis: eigendecomposition failed");
  const Eigen::VectorXd& evals = es.eigenvalues();  // ascending
  double lam_max = evals(C - 1);
  double lam_dim = evals(C - dim);
  if (!(lam_max > 0.0) || lam_dim <= 1e-12 * lam_max) {
    std::ostringstream os;
    os << "compute_basis: training spectra have rank below " << dim;
    throw std::runtime_error(os.str());
  }

  SpectralBasis basis;
  basis.dim = dim;
  basis.channels = C;
  basis.rows.resize(static_cast<std::size_t>(dim) * C);
  for (int k = 0; k < dim; ++k) {
    Eigen::VectorXd v = es.eigenvectors().col(C - 1 - k);  // descending order
    int arg = 0;
    for (int j = 1; j < C; ++j)
      if (std::abs(v(j)) > std::abs(v(arg))) arg = j;  // first index wins ties
    if (v(arg) < 0.0) v = -v;
    for (int j = 0; j < C; ++j) basis.at(k, j) = v(j);
  }
  require_valid(validate(basis), "compute_basis produced");
  return basis;
}

SpectralBasis compute_basis(const HyperspectralCube& training, int dim) {
  return compute_basis(std::span<const HyperspectralCube>(&training, 1), dim);
}

void project_planes(const double* cube_planes, std::size_t hw, const SpectralBasis& basis,
                    double* coeff_planes) {
  const int v = basis.dim, C = basis.channels;
  for (int k = 0; k < v; ++k) {
    double* out = coeff_planes + static_cast<std::size_t>(k) * hw;
    std::fill(out, out + hw, 0.0);
    for (int j = 0; j < C; ++j) {
      const double b = basis.at(k, j);
      const double* src = cube_planes + static_cast<std::size_t>(j) * hw;
#pragma omp parallel for schedule(static)
      for (long long q = 0; q < static_cast<long long>(hw); ++q) out[q] += b * src[q];
    }
  }
}

void lift_planes(const double* coeff_planes, std::size_t hw, const SpectralBasis& basis,
                 double* cube_planes) {
  const int v = basis.dim, C = basis.channels;
  for (int j = 0; j < C; ++j) {
    double* out = cube_planes + static_cast<std::size_t>(j) * hw;
    std::fill(out, out + hw, 0.0);
    for (int k = 0; k < v; ++k) {
      const double b = basis.at(k, j);
      const double* src = coeff_planes + static_cast<std::size_t>(k) * hw;
#pragma omp parallel for schedule(static)
      for (long long q = 0; q < static_cast<long long>(hw); ++q) out[q] += b * src[q];
    }
  }
}

CoefficientField project(const HyperspectralCube& cube, const SpectralBasis& basis) {
  require_valid(validate(cube), "project");
  require_valid(validate(basis), "project");
  if (cube.channels != basis.channels)
    throw std::invalid_argument("project: cube and basis channel counts differ");
  CoefficientField field;
  field.height = cube.height;
  field.width = cube.width;
  field.dim = basis.dim;
  field.data.resize(field.plane_size() * basis.dim);
  project_planes(cube.data.data(), cube.plane_size(), basis, field.data.data());
  return field;
}

HyperspectralCube lift(const CoefficientField& field, const SpectralBasis& basis,
                       const std::vector<double>& wavelengths_nm) {
  require_valid(validate(basis), "lift");
  if (field.dim != basis.dim)
    throw std::invalid_argument("lift: field and basis dims differ");
  if (field.height < 1 || field.width < 1 ||
      field.data.size() != field.plane_size() * field.dim)
    throw std::invalid_argument("lift: malformed coefficient field");
  if (static_cast<int>(wavelengths_nm.size()) != basis.channels)
    throw std::invalid_argument("lift: wavelength count does not match basis channels");
  HyperspectralCube cube;
  cube.height = field.height;
  cube.width = field.width;
  cube.channels = basis.channels;
  cube.wavelengths_nm = wavelengths_nm;
  cube.data.resize(cube.plane_size() * cube.channels);
  lift_planes(field.data.data(), field.plane_size(), basis, cube.data.data());
  return cube;
}

SpectralBasis halve_basis(const SpectralBasis& basis) {
  require_valid(validate(basis), "halve_basis");
  if (basis.dim <= 1) throw std::invalid_argument("halve_basis: cannot halve a rank-1 basis");
  SpectralBasis out;
  out.dim = (basis.dim + 1) / 2;
  out.channels = basis.channels;
  out.rows.assign(basis.rows.begin(),
                  basis.rows.begin() + static_cast<std::size_t>(out.dim) * out.channels);
  return out;
}

void write_basis_csv(const std::string& path, const SpectralBasis& basis) {
  require_valid(validate(basis), "write_basis_csv");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << basis.dim << "," << basis.channels << "\n";
  char buf[40];
  for (int k = 0; k < basis.dim; ++k) {
    for (int j = 0; j < basis.channels; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", basis.at(k, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

SpectralBasis read_basis_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open basis file '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("basis file '" + path + "' is empty");
  SpectralBasis basis;
  {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    if (!(ls >> basis.dim >> basis.channels) || basis.dim < 1 || basis.channels < 1)
      throw std::runtime_error("basis file '" + path + "' has a malformed header");
  }
  basis.rows.reserve(static_cast<std::size_t>(basis.dim) * basis.channels);
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x;
    int got = 0;
    while (ls >> x) {
      basis.rows.push_back(x);
      ++got;
    }
    if (got != basis.channels) {
      std::ostringstream os;
      os << "basis file '" << path << "' row " << row << " has " << got << " entries, expected "
         << basis.channels;
      throw std::runtime_error(os.str());
    }
  }
  if (row != basis.dim) {
    std::ostringstream os;
    os << "basis file '" << path << "' has " << row << " rows, expected " << basis.dim;
    throw std::runtime_error(os.str());
  }
  require_valid(validate(basis), ("basis file '" + path + "'").c_str());
  return basis;
}

}  // namespace csweep
