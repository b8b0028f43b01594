#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "csweep/basis.hpp"
#include "csweep/types.hpp"
#include "reference.hpp"

using namespace csweep;

namespace {

HyperspectralCube cube_from_spectra(int h, int w,
                                    const std::vector<std::vector<double>>& pixel_spectra) {
  const int c = static_cast<int>(pixel_spectra[0].size());
  HyperspectralCube cube;
  cube.height = h;
  cube.width = w;
  cube.channels = c;
  cube.wavelengths_nm.resize(c);
  for (int j = 0; j < c; ++j) cube.wavelengths_nm[j] = 440.0 + 10.0 * j;
  cube.data.resize(static_cast<std::size_t>(h) * w * c);
  for (int p = 0; p < h * w; ++p)
    for (int j = 0; j < c; ++j)
      cube.data[static_cast<std::size_t>(j) * h * w + p] = pixel_spectra[p % pixel_spectra.size()][j];
  return cube;
}

HyperspectralCube wavy_cube(int h, int w, int c) {
  std::vector<std::vector<double>> spectra;
  for (int p = 0; p < h * w; ++p) {
    std::vector<double> s(c);
    for (int j = 0; j < c; ++j)
      s[j] = 0.5 + 0.4 * std::sin(0.7 + 1.3 * p + 0.9 * j) * std::cos(0.3 * p * j);
    spectra.push_back(s);
  }
  return cube_from_spectra(h, w, spectra);
}

double frob(const HyperspectralCube& a, const HyperspectralCube& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    double d = a.data[i] - b.data[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double identity_gap(const SpectralBasis& basis) {
  double worst = 0.0;
  for (int k = 0; k < basis.dim; ++k)
    for (int l = 0; l < basis.dim; ++l) {
      double s = 0.0;
      for (int j = 0; j < basis.channels; ++j) s += basis.at(k, j) * basis.at(l, j);
      worst = std::max(worst, std::abs(s - (k == l ? 1.0 : 0.0)));
    }
  return worst;
}

// Gram eigenvalues of the training spectra, descending; lambda_k = sigma_k^2.
std::vector<double> gram_eigenvalues(const HyperspectralCube& cube) {
  const int c = cube.channels;
  std::vector<double> gram(static_cast<std::size_t>(c) * c, 0.0);
  for (std::size_t p = 0; p < cube.plane_size(); ++p)
    for (int a = 0; a < c; ++a)
      for (int b = 0; b < c; ++b)
        gram[static_cast<std::size_t>(a) * c + b] += cube.plane(a)[p] * cube.plane(b)[p];
  return ref::jacobi_eigen(gram, c).values;
}

}  // namespace

TEST_CASE("a rank-one training set yields its normalized spectrum") {
  std::vector<double> s = {0.2, 0.9, 0.3, 0.1};
  HyperspectralCube cube = cube_from_spectra(3, 3, {s});
  SpectralBasis basis = compute_basis(cube, 1);
  double norm = 0.0;
  for (double v : s) norm += v * v;
  norm = std::sqrt(norm);
  for (int j = 0; j < 4; ++j)
    CHECK(basis.at(0, j) == doctest::Approx(s[j] / norm).epsilon(1e-12));
}

TEST_CASE("two orthogonal spectral populations are captured exactly at dim 2") {
  std::vector<double> s1 = {1.0, 1.0, 0.0, 0.0};
  std::vector<double> s2 = {0.0, 0.0, 2.0, 1.0};  // orthogonal to s1
  HyperspectralCube cube = cube_from_spectra(4, 4, {s1, s2, s1, s2});
  SpectralBasis basis = compute_basis(cube, 2);
  HyperspectralCube round = lift(project(cube, basis), basis, cube.wavelengths_nm);
  CHECK(frob(round, cube) < 1e-10);
}

TEST_CASE("basis rows are orthonormal and capture the dominant subspace") {
  HyperspectralCube cube = wavy_cube(10, 10, 6);
  SpectralBasis basis = compute_basis(cube, 4);
  CHECK(identity_gap(basis) < 1e-10);

  // residual energy must match the tail eigenvalues of the spectra Gram matrix
  HyperspectralCube round = lift(project(cube, basis), basis, cube.wavelengths_nm);
  const double residual = frob(round, cube);
  std::vector<double> lambda = gram_eigenvalues(cube);
  double tail = 0.0;
  for (std::size_t k = 4; k < lambda.size(); ++k) tail += std::max(lambda[k], 0.0);
  CHECK(residual == doctest::Approx(std::sqrt(tail)).epsilon(1e-8));
}

TEST_CASE("training sets below the requested rank are rejected") {
  HyperspectralCube flat = cube_from_spectra(3, 3, {{0.4, 0.2, 0.1}});
  CHECK_THROWS(compute_basis(flat, 2));
}

TEST_CASE("multiple training cubes pool their spectra") {
  HyperspectralCube a = cube_from_spectra(2, 2, {{1.0, 0.0, 0.0}});
  HyperspectralCube b = cube_from_spectra(2, 2, {{0.0, 1.0, 0.0}});
  std::vector<HyperspectralCube> both = {a, b};
  SpectralBasis basis = compute_basis(both, 2);  // each cube alone has rank 1
  CHECK(identity_gap(basis) < 1e-12);
}

TEST_CASE("identity basis makes projection the identity") {
  HyperspectralCube cube = wavy_cube(4, 5, 3);
  SpectralBasis eye;
  eye.dim = 3;
  eye.channels = 3;
  eye.rows = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  CoefficientField z = project(cube, eye);
  for (std::size_t i = 0; i < cube.data.size(); ++i) CHECK(z.data[i] == cube.data[i]);
  HyperspectralCube back = lift(z, eye, cube.wavelengths_nm);
  CHECK(back.data == cube.data);
}

TEST_CASE("spectra orthogonal to every basis vector project to zero") {
  SpectralBasis basis;
  basis.dim = 1;
  basis.channels = 3;
  basis.rows = {1.0, 0.0, 0.0};
  HyperspectralCube cube = cube_from_spectra(2, 2, {{0.0, 0.7, 0.4}});
  CoefficientField z = project(cube, basis);
  for (double v : z.data) CHECK(v == 0.0);
}

TEST_CASE("project after lift is the identity on coefficients") {
  HyperspectralCube cube = wavy_cube(6, 6, 5);
  SpectralBasis basis = compute_basis(cube, 3);
  CoefficientField z = project(cube, basis);
  CoefficientField round = project(lift(z, basis, cube.wavelengths_nm), basis);
  for (std::size_t i = 0; i < z.data.size(); ++i)
    CHECK(round.data[i] == doctest::Approx(z.data[i]).epsilon(1e-12));
}

TEST_CASE("zero coefficients lift to a zero cube") {
  SpectralBasis basis = compute_basis(wavy_cube(4, 4, 4), 2);
  CoefficientField z;
  z.height = 4;
  z.width = 4;
  z.dim = 2;
  z.data.assign(32, 0.0);
  HyperspectralCube cube = lift(z, basis, {440, 450, 460, 470});
  for (double v : cube.data) CHECK(v == 0.0);
}

TEST_CASE("rank-v projection is as good as the best rank-v approximation") {
  HyperspectralCube cube = wavy_cube(8, 8, 6);
  std::vector<double> lambda = gram_eigenvalues(cube);
  for (int v : {2, 4}) {
    SpectralBasis basis = compute_basis(cube, v);
    HyperspectralCube round = lift(project(cube, basis), basis, cube.wavelengths_nm);
    double tail = 0.0;
    for (std::size_t k = static_cast<std::size_t>(v); k < lambda.size(); ++k)
      tail += std::max(lambda[k], 0.0);
    CHECK(frob(round, cube) <= std::sqrt(tail) + 1e-10);
  }
}

TEST_CASE("lift is the adjoint of project") {
  HyperspectralCube cube = wavy_cube(5, 5, 4);
  SpectralBasis basis = compute_basis(cube, 3);
  CoefficientField z;
  z.height = 5;
  z.width = 5;
  z.dim = 3;
  z.data.resize(75);
  for (std::size_t i = 0; i < z.data.size(); ++i) z.data[i] = std::sin(0.31 * i);

  CoefficientField px = project(cube, basis);
  HyperspectralCube lz = lift(z, basis, cube.wavelengths_nm);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < px.data.size(); ++i) lhs += px.data[i] * z.data[i];
  for (std::size_t i = 0; i < cube.data.size(); ++i) rhs += cube.data[i] * lz.data[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("reconstruction error is monotone in basis size") {
  HyperspectralCube cube = wavy_cube(7, 7, 6);
  double previous = 1e300;
  for (int v = 1; v <= 6; ++v) {
    SpectralBasis basis = compute_basis(cube, v);
    double err = frob(lift(project(cube, basis), basis, cube.wavelengths_nm), cube);
    CHECK(err <= previous + 1e-10);
    previous = err;
  }
}

TEST_CASE("halving keeps the leading half of the basis") {
  HyperspectralCube cube = wavy_cube(12, 12, 16);
  SpectralBasis b16 = compute_basis(cube, 16);
  SpectralBasis b8 = halve_basis(b16);
  CHECK(b8.dim == 8);
  CHECK(identity_gap(b8) < 1e-10);
  for (int k = 0; k < 8; ++k)
    for (int j = 0; j < 16; ++j) CHECK(b8.at(k, j) == b16.at(k, j));

  SpectralBasis b3 = compute_basis(wavy_cube(6, 6, 5), 3);
  CHECK(halve_basis(b3).dim == 2);  // ceiling of 3/2

  SpectralBasis b1 = compute_basis(wavy_cube(4, 4, 3), 1);
  CHECK_THROWS(halve_basis(b1));
}
