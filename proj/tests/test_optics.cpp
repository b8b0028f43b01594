#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "csweep/optics.hpp"
#include "csweep/types.hpp"

using namespace csweep;

namespace {

LensDispersion constant_lens(double f_mm) {
  return {{400.0, 800.0}, {f_mm, f_mm}};
}

// Two-point rear-lens table tuned so the combined focal length of the pair
// (front lens fixed at 100 mm, contact spacing) spans exactly `span_mm`
// between 440 and 720 nm.
OpticalConfig sweep_config(double span_mm) {
  const double f1 = 100.0, f2_lo = 80.0;
  const double c_lo = f1 * f2_lo / (f1 + f2_lo);
  const double c_hi = c_lo + span_mm;
  const double f2_hi = f1 * c_hi / (f1 - c_hi);
  OpticalConfig config;
  config.lens1 = constant_lens(f1);
  config.lens2 = {{440.0, 720.0}, {f2_lo, f2_hi}};
  config.separation_mm = 0.0;
  config.reference_wavelength_nm = 550.0;
  return config;
}

std::vector<double> bands(double lo, double hi, double step) {
  std::vector<double> w;
  for (double x = lo; x <= hi + 1e-9; x += step) w.push_back(x);
  return w;
}

double second_moment(const std::vector<double>& kernel, int size) {
  double m = 0.0;
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) {
      double dy = r - size / 2, dx = c - size / 2;
      m += kernel[static_cast<std::size_t>(r) * size + c] * (dy * dy + dx * dx);
    }
  return m;
}

}  // namespace

TEST_CASE("combined focal length follows the two-lens power sum") {
  CHECK(combined_focal_length(50.0, 50.0, 0.0) == doctest::Approx(25.0).epsilon(1e-12));
  CHECK(combined_focal_length(50.0, 1e15, 0.0) == doctest::Approx(50.0).epsilon(1e-9));
  CHECK(combined_focal_length(50.0, 50.0, 10.0) ==
        doctest::Approx(1.0 / 0.036).epsilon(1e-12));
  CHECK_THROWS(combined_focal_length(50.0, 50.0, 100.0));  // combined power <= 0
}

TEST_CASE("dispersionless lenses produce an identically zero shift curve") {
  OpticalConfig config;
  config.lens1 = constant_lens(100.0);
  config.lens2 = constant_lens(80.0);
  for (double shift : focal_shift_curve(config, bands(440.0, 720.0, 40.0)))
    CHECK(shift == 0.0);
}

TEST_CASE("the shift at the reference wavelength is exactly zero") {
  OpticalConfig config = sweep_config(0.7);
  std::vector<double> curve = focal_shift_curve(config, {470.0, 550.0, 710.0});
  CHECK(curve[1] == 0.0);
}

TEST_CASE("shift curve matches pointwise hand evaluation") {
  // contact pair, constant front lens, rear focal length linear in wavelength
  OpticalConfig config;
  config.lens1 = constant_lens(100.0);
  config.lens2 = {{400.0, 700.0}, {80.0, 83.0}};
  config.separation_mm = 0.0;
  config.reference_wavelength_nm = 550.0;
  const auto f2_at = [&](double w) { return 80.0 + 3.0 * (w - 400.0) / 300.0; };
  const auto combined = [&](double w) {
    return combined_focal_length(100.0, f2_at(w), 0.0);
  };
  std::vector<double> probe = {430.0, 580.0, 690.0};
  std::vector<double> curve = focal_shift_curve(config, probe);
  for (std::size_t i = 0; i < probe.size(); ++i)
    CHECK(curve[i] == doctest::Approx(combined(probe[i]) - combined(550.0)).epsilon(1e-12));
}

TEST_CASE("a sweep-tuned pair spans 0.7 mm across the visible band") {
  OpticalConfig config = sweep_config(0.7);
  std::vector<double> curve = focal_shift_curve(config, bands(440.0, 720.0, 10.0));
  CHECK(curve.size() == 29);
  const auto [lo, hi] = std::minmax_element(curve.begin(), curve.end());
  CHECK(*hi - *lo == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("shift curve refuses wavelengths outside the dispersion tables") {
  OpticalConfig config = sweep_config(0.7);
  CHECK_THROWS(focal_shift_curve(config, {430.0}));
  CHECK_THROWS(focal_shift_curve(config, {725.0}));
}

TEST_CASE("lens positions are spaced evenly across the shift span") {
  std::vector<double> linear = {0.0, 0.175, 0.35, 0.525, 0.7};

  std::vector<double> two = select_lens_positions({0.0, 0.7}, 2);
  CHECK(two[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(two[1] == doctest::Approx(0.7).epsilon(1e-12));

  std::vector<double> five = select_lens_positions(linear, 5);
  REQUIRE(five.size() == 5);
  for (int i = 0; i < 5; ++i)
    CHECK(five[i] == doctest::Approx(0.175 * i).epsilon(1e-12));

  std::vector<double> one = select_lens_positions(linear, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(0.35).epsilon(1e-12));

  CHECK_THROWS(select_lens_positions({0.2, 0.2, 0.2}, 2));  // constant curve
}

TEST_CASE("selected positions form an arithmetic sequence") {
  OpticalConfig config = sweep_config(0.7);
  std::vector<double> curve = focal_shift_curve(config, bands(440.0, 720.0, 10.0));
  std::vector<double> pos = select_lens_positions(curve, 7);
  REQUIRE(pos.size() == 7);
  const double step = pos[1] - pos[0];
  for (std::size_t i = 2; i < pos.size(); ++i)
    CHECK(pos[i] - pos[i - 1] == doctest::Approx(step).epsilon(1e-12));
  CHECK(std::is_sorted(pos.begin(), pos.end()));
}

TEST_CASE("depth of field follows 2NCs^2/f^2") {
  CHECK(depth_of_field(4.0, 0.0, 2.0, 0.05) == 0.0);
  CHECK(depth_of_field(1.0, 1e-5, 1.0, 0.05) == doctest::Approx(8e-3).epsilon(1e-12));
  CHECK(depth_of_field(2.0, 11.76e-6, 2.8, 0.025) == doctest::Approx(0.590).epsilon(1e-3));
  // homogeneous of degree two in subject distance
  const double base = depth_of_field(2.0, 1e-5, 1.5, 0.04);
  CHECK(depth_of_field(2.0, 1e-5, 4.5, 0.04) == doctest::Approx(9.0 * base).epsilon(1e-12));
}

TEST_CASE("in-focus kernels degenerate to a centered delta") {
  OpticalConfig config = sweep_config(0.7);
  std::vector<double> kernel = synthesize_psf(config, 550.0, 0.0, 9);
  CHECK(kernel[4 * 9 + 4] == 1.0);
  double sum = 0.0;
  for (double v : kernel) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("every synthesized kernel is normalized and four-fold symmetric") {
  OpticalConfig config = sweep_config(0.7);
  const int size = 29;
  for (double w : {460.0, 550.0, 640.0, 720.0})
    for (double pos : {0.0, 0.35, 0.7}) {
      std::vector<double> kernel = synthesize_psf(config, w, pos, size);
      double sum = 0.0;
      for (double v : kernel) sum += v;
      CHECK(std::abs(sum - 1.0) < 1e-9);
      for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c)  // exact 90-degree rotation invariance
          CHECK(kernel[static_cast<std::size_t>(r) * size + c] ==
                kernel[static_cast<std::size_t>(c) * size + (size - 1 - r)]);
    }
}

TEST_CASE("larger defocus produces a strictly wider kernel") {
  OpticalConfig config = sweep_config(0.7);
  std::vector<double> curve = focal_shift_curve(config, bands(440.0, 720.0, 10.0));
  // position at the near end; far wavelengths sit further from focus
  const int size = 25;
  std::vector<double> near = synthesize_psf(config, 530.0, 0.0, size);
  std::vector<double> far = synthesize_psf(config, 700.0, 0.0, size);
  CHECK(second_moment(far, size) > second_moment(near, size));
  CHECK(defocus_blur_rate(config) > 0.0);
}

TEST_CASE("a single in-focus kernel bank is a delta") {
  OpticalConfig config = sweep_config(0.7);
  PsfStack bank = build_psf_stack(config, {0.0}, {550.0});
  CHECK(bank.count == 1);
  CHECK(bank.channels == 1);
  CHECK(bank.kernel(0, 0)[(bank.kernel_size / 2) * bank.kernel_size + bank.kernel_size / 2] ==
        1.0);
}

TEST_CASE("the in-focus band index advances with the lens position") {
  OpticalConfig config = sweep_config(0.7);
  std::vector<double> wavelengths = bands(440.0, 720.0, 10.0);
  std::vector<double> curve = focal_shift_curve(config, wavelengths);
  std::vector<double> positions = select_lens_positions(curve, 5);
  PsfStack bank = build_psf_stack(config, positions, wavelengths);
  CHECK(bank.channels == 29);
  CHECK(validate(bank).ok());

  int previous = -1;
  for (int i = 0; i < bank.count; ++i) {
    int sharpest = 0;
    double best = 1e300;
    for (int j = 0; j < bank.channels; ++j) {
      std::vector<double> kernel(bank.kernel(i, j),
                                 bank.kernel(i, j) + bank.kernel_area());
      double m = second_moment(kernel, bank.kernel_size);
      if (m < best) {
        best = m;
        sharpest = j;
      }
    }
    CHECK(sharpest > previous);
    previous = sharpest;
  }
}

TEST_CASE("oversized blur disks are rejected") {
  OpticalConfig config = sweep_config(0.7);
  config.max_kernel_px = 3;  // far smaller than the sweep's blur circles
  std::vector<double> wavelengths = bands(440.0, 720.0, 40.0);
  std::vector<double> curve = focal_shift_curve(config, wavelengths);
  CHECK_THROWS(build_psf_stack(config, select_lens_positions(curve, 3), wavelengths));
}

TEST_CASE("dispersion tables load from headed CSV") {
  const std::string path = "optics_scratch_lens.csv";
  {
    std::ofstream out(path);
    out << "wavelength_nm,focal_length_mm\n440,100.0\n720,101.5\n";
  }
  LensDispersion lens = read_dispersion_csv(path);
  CHECK(lens.focal_length_at(440.0) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(lens.focal_length_at(580.0) == doctest::Approx(100.75).epsilon(1e-12));
  CHECK_THROWS(read_dispersion_csv("missing_lens.csv"));
  std::remove(path.c_str());
}
