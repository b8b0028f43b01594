#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "csweep/metrics.hpp"
#include "csweep/types.hpp"
#include "reference.hpp"

using namespace csweep;

namespace {

struct Rand {
  std::uint64_t s;
  explicit Rand(std::uint64_t seed) : s(seed * 2685821657736338717ull + 1) {}
  double next() {
    s ^= s >> 12;
    s ^= s << 25;
    s ^= s >> 27;
    return static_cast<double>((s * 2685821657736338717ull) >> 11) / 9007199254740992.0;
  }
};

HyperspectralCube make_cube(int h, int w, int c, double fill = 0.0) {
  HyperspectralCube cube;
  cube.height = h;
  cube.width = w;
  cube.channels = c;
  cube.wavelengths_nm.resize(c);
  for (int j = 0; j < c; ++j)
    cube.wavelengths_nm[j] = c > 1 ? 440.0 + 280.0 * j / (c - 1) : 550.0;
  cube.data.assign(static_cast<std::size_t>(h) * w * c, fill);
  return cube;
}

HyperspectralCube random_cube(int h, int w, int c, Rand& rng) {
  HyperspectralCube cube = make_cube(h, w, c);
  for (double& v : cube.data) v = rng.next();
  return cube;
}

}  // namespace

TEST_CASE("psnr follows the closed form") {
  HyperspectralCube truth = make_cube(4, 5, 2, 0.5);
  CHECK(std::isinf(psnr(truth, truth)));

  HyperspectralCube recon = truth;
  for (double& v : recon.data) v = 0.0;  // uniform error 0.5 -> mse 0.25
  CHECK(psnr(recon, truth) == doctest::Approx(10.0 * std::log10(4.0)).epsilon(1e-9));
  CHECK(psnr(recon, truth) == doctest::Approx(6.0205999132796239).epsilon(1e-9));

  // half the voxels off by one -> mse 0.5
  HyperspectralCube half = truth;
  for (std::size_t i = 0; i < half.data.size(); i += 2) half.data[i] += 1.0;
  CHECK(psnr(half, truth) == doctest::Approx(10.0 * std::log10(2.0)).epsilon(1e-9));

  CHECK(psnr(recon, truth) == doctest::Approx(psnr(truth, recon)).epsilon(1e-12));
  CHECK(psnr(recon, truth, 2.0) ==
        doctest::Approx(psnr(recon, truth) + 20.0 * std::log10(2.0)).epsilon(1e-9));

  HyperspectralCube other = make_cube(4, 4, 2);
  CHECK_THROWS(psnr(other, truth));
}

TEST_CASE("ssim saturates at one and matches the direct sliding-window reference") {
  Rand rng(101);
  HyperspectralCube a = random_cube(16, 16, 2, rng);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

  HyperspectralCube flat = make_cube(16, 16, 1, 0.3);
  CHECK(ssim(flat, flat) == doctest::Approx(1.0).epsilon(1e-12));

  HyperspectralCube b = a;
  for (double& v : b.data) v = std::min(1.0, std::max(0.0, v + 0.2 * (rng.next() - 0.5)));
  double fast = ssim(b, a);
  double direct = ref::ssim_direct(b, a);
  CHECK(fast == doctest::Approx(direct).epsilon(1e-6));
  CHECK(fast < 1.0);
  CHECK(fast > 0.0);

  // window does not fit
  HyperspectralCube tiny = make_cube(8, 8, 1, 0.5);
  CHECK_THROWS(ssim(tiny, tiny));
}

TEST_CASE("spectral angle measures per-pixel orientation only") {
  // two pixels: one orthogonal pair, one aligned pair
  HyperspectralCube truth = make_cube(1, 2, 2);
  HyperspectralCube recon = make_cube(1, 2, 2);
  truth.at(0, 0, 0) = 1.0;  // pixel 0 spectrum (1, 0)
  truth.at(0, 0, 1) = 1.0;  // pixel 1 spectrum (1, 0)
  recon.at(1, 0, 0) = 1.0;  // pixel 0 spectrum (0, 1)
  recon.at(0, 0, 1) = 1.0;  // pixel 1 spectrum (1, 0)
  CHECK(sam_degrees(recon, truth) == doctest::Approx(45.0).epsilon(1e-9));

  HyperspectralCube diag = make_cube(1, 1, 2);
  HyperspectralCube axis = make_cube(1, 1, 2);
  diag.at(0, 0, 0) = 1.0;
  diag.at(1, 0, 0) = 1.0;
  axis.at(0, 0, 0) = 1.0;
  CHECK(sam_degrees(diag, axis) == doctest::Approx(45.0).epsilon(1e-9));

  // scaling either argument changes nothing
  HyperspectralCube scaled = diag;
  for (double& v : scaled.data) v *= 3.0;
  CHECK(sam_degrees(scaled, axis) == doctest::Approx(45.0).epsilon(1e-9));
  CHECK(sam_degrees(diag, diag) < 1e-5);  // acos noise floor, not exact zero

  // a zero spectrum drops its pixel from the mean
  HyperspectralCube gap = recon;
  gap.at(0, 0, 1) = 0.0;  // pixel 1 spectrum now zero
  CHECK(sam_degrees(gap, truth) == doctest::Approx(90.0).epsilon(1e-9));

  HyperspectralCube zeros = make_cube(2, 2, 2);
  CHECK(sam_degrees(zeros, zeros) == 0.0);
}

TEST_CASE("color difference reproduces published verification pairs") {
  // gray-axis pair with a mean lightness of 50 collapses to the lightness gap
  CHECK(ciede2000({40.0, 0.0, 0.0}, {60.0, 0.0, 0.0}) == doctest::Approx(20.0).epsilon(1e-9));

  // lightness-only pair off the pivot engages the lightness weight
  {
    double lbar = 60.0, d = (lbar - 50.0) * (lbar - 50.0);
    double sl = 1.0 + 0.015 * d / std::sqrt(20.0 + d);
    CHECK(ciede2000({50.0, 0.0, 0.0}, {70.0, 0.0, 0.0}) ==
          doctest::Approx(20.0 / sl).epsilon(1e-9));
  }

  const struct {
    Lab x, y;
    double want;
  } pairs[] = {
      {{50.0, 2.6772, -79.7751}, {50.0, 0.0, -82.7485}, 2.0424596802},
      {{50.0, 3.1571, -77.2803}, {50.0, 0.0, -82.7485}, 2.8615101747},
      {{50.0, 2.8361, -74.02}, {50.0, 0.0, -82.7485}, 3.4411905987},
      {{50.0, -1.3802, -84.2814}, {50.0, 0.0, -82.7485}, 0.9999988648},
      {{50.0, 2.5, 0.0}, {73.0, 25.0, -18.0}, 27.1492313007},
      {{50.0, 2.5, 0.0}, {61.0, -5.0, 29.0}, 22.8976924698},
      {{35.0831, -44.1164, 3.7933}, {35.0232, -40.0716, 1.5901}, 1.8644952342},
      {{2.0776, 0.0795, -1.135}, {0.9033, -0.0636, -0.5514}, 0.9082328396},
  };
  for (const auto& p : pairs) {
    CHECK(std::abs(ciede2000(p.x, p.y) - p.want) < 1e-4);
    CHECK(ciede2000(p.x, p.y) == doctest::Approx(ciede2000(p.y, p.x)).epsilon(1e-12));
  }
  CHECK(ciede2000({31.4, -2.0, 7.5}, {31.4, -2.0, 7.5}) == 0.0);
}

TEST_CASE("tristimulus integration is linear and white-anchored") {
  Rand rng(211);
  const ColorMatch& cm = ColorMatch::cie1931_d65();
  HyperspectralCube a = random_cube(3, 4, 8, rng);
  HyperspectralCube b = random_cube(3, 4, 8, rng);
  HyperspectralCube sum = a;
  for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += b.data[i];

  std::vector<double> xa = hsi_to_xyz(a, cm);
  std::vector<double> xb = hsi_to_xyz(b, cm);
  std::vector<double> xs = hsi_to_xyz(sum, cm);
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(xs[i] == doctest::Approx(xa[i] + xb[i]).epsilon(1e-12));

  HyperspectralCube twice = a;
  for (double& v : twice.data) v *= 2.0;
  std::vector<double> xt = hsi_to_xyz(twice, cm);
  for (std::size_t i = 0; i < xt.size(); ++i)
    CHECK(xt[i] == doctest::Approx(2.0 * xa[i]).epsilon(1e-12));

  // unit reflectance integrates to the white point: unit luminance plane
  HyperspectralCube flat = make_cube(2, 2, 8, 1.0);
  std::vector<double> xf = hsi_to_xyz(flat, cm);
  for (std::size_t q = 0; q < 4; ++q) CHECK(xf[4 + q] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("spectral rendering maps flat spectra to neutral gray") {
  HyperspectralCube zero = make_cube(3, 3, 8, 0.0);
  RgbImage black = hsi_to_rgb(zero);
  for (double v : black.data) CHECK(v == 0.0);

  HyperspectralCube flat = make_cube(3, 3, 8, 0.4);
  RgbImage gray = hsi_to_rgb(flat);
  const double want = 1.055 * std::pow(0.4, 1.0 / 2.4) - 0.055;
  for (std::size_t q = 0; q < gray.plane_size(); ++q) {
    CHECK(gray.plane(0)[q] == doctest::Approx(want).epsilon(1e-6));
    CHECK(gray.plane(1)[q] == doctest::Approx(want).epsilon(1e-6));
    CHECK(gray.plane(2)[q] == doctest::Approx(want).epsilon(1e-6));
  }

  // a narrow spike near 550 nm renders green-dominant
  HyperspectralCube spike = make_cube(1, 1, 29);
  for (int j = 0; j < 29; ++j) spike.wavelengths_nm[j] = 440.0 + 10.0 * j;
  spike.at(11, 0, 0) = 1.0;  // 550 nm
  RgbImage g = hsi_to_rgb(spike);
  CHECK(g.plane(1)[0] > g.plane(0)[0]);
  CHECK(g.plane(1)[0] > g.plane(2)[0]);
  CHECK(g.plane(1)[0] > 0.0);
}

TEST_CASE("mean color difference vanishes only on identical renderings") {
  Rand rng(223);
  HyperspectralCube a = random_cube(4, 4, 8, rng);
  CHECK(delta_e00_mean(a, a) == doctest::Approx(0.0).epsilon(1e-12));

  HyperspectralCube warm = a;
  for (std::size_t q = 0; q < warm.plane_size(); ++q) warm.plane(7)[q] += 0.3;
  double d = delta_e00_mean(warm, a);
  CHECK(d > 0.0);
  CHECK(d == doctest::Approx(delta_e00_mean(a, warm)).epsilon(1e-12));
}

TEST_CASE("stack composites copy planes and honor the white patch") {
  FocalStack stack;
  stack.height = 4;
  stack.width = 4;
  stack.count = 4;
  stack.lens_positions_mm = {0.0, 0.1, 0.2, 0.3};
  stack.data.resize(static_cast<std::size_t>(4) * 4 * 4);
  for (int i = 0; i < 4; ++i)
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) stack.at(i, r, c) = 0.1 * (i + 1) + 0.01 * (r * 4 + c);

  RgbImage plain = compose_rgb_from_stack(stack, 3, 1, 0);
  for (std::size_t q = 0; q < plain.plane_size(); ++q) {
    CHECK(plain.plane(0)[q] == stack.plane(3)[q]);
    CHECK(plain.plane(1)[q] == stack.plane(1)[q]);
    CHECK(plain.plane(2)[q] == stack.plane(0)[q]);
  }

  // white patch of constant 2.0 in the red source plane halves that channel
  FocalStack lit = stack;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      lit.at(3, r, c) = 2.0;
      lit.at(1, r, c) = 1.0;
      lit.at(0, r, c) = 1.0;
    }
  PatchRect patch{0, 0, 2, 2};
  RgbImage balanced = compose_rgb_from_stack(lit, 3, 1, 0, patch);
  for (std::size_t q = 0; q < balanced.plane_size(); ++q) {
    CHECK(balanced.plane(0)[q] == doctest::Approx(lit.plane(3)[q] / 2.0).epsilon(1e-12));
    CHECK(balanced.plane(1)[q] == doctest::Approx(lit.plane(1)[q]).epsilon(1e-12));
    CHECK(balanced.plane(2)[q] == doctest::Approx(lit.plane(0)[q]).epsilon(1e-12));
  }
  // the patch itself becomes neutral
  CHECK(balanced.plane(0)[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(balanced.plane(1)[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(balanced.plane(2)[0] == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS(compose_rgb_from_stack(stack, 4, 1, 0));
  CHECK_THROWS(compose_rgb_from_stack(stack, -1, 1, 0));
  PatchRect outside{3, 3, 2, 2};
  CHECK_THROWS(compose_rgb_from_stack(stack, 3, 1, 0, outside));
}
