// Timing harness: production kernels against their serial reference mirrors
// on one mid-sized instance each. Also reports the agreement between the two
// paths, since a fast-but-wrong kernel is worse than no kernel.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "csweep/forward.hpp"
#include "csweep/metrics.hpp"
#include "csweep/solver.hpp"
#include "csweep/threads.hpp"
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

HyperspectralCube random_cube(int h, int w, int c, Rand& rng) {
  HyperspectralCube cube;
  cube.height = h;
  cube.width = w;
  cube.channels = c;
  cube.wavelengths_nm.resize(c);
  for (int j = 0; j < c; ++j) cube.wavelengths_nm[j] = 440.0 + 10.0 * j;
  cube.data.resize(static_cast<std::size_t>(h) * w * c);
  for (double& v : cube.data) v = rng.next();
  return cube;
}

PsfStack random_bank(int n, int c, int k, Rand& rng) {
  PsfStack bank;
  bank.count = n;
  bank.channels = c;
  bank.kernel_size = k;
  bank.lens_positions_mm.resize(n);
  for (int i = 0; i < n; ++i) bank.lens_positions_mm[i] = 0.1 * i;
  bank.wavelengths_nm.resize(c);
  for (int j = 0; j < c; ++j) bank.wavelengths_nm[j] = 440.0 + 10.0 * j;
  bank.kernels.resize(static_cast<std::size_t>(n) * c * k * k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < c; ++j) {
      double* ker = bank.kernel(i, j);
      double sum = 0.0;
      for (std::size_t q = 0; q < bank.kernel_area(); ++q) {
        ker[q] = 0.05 + rng.next();
        sum += ker[q];
      }
      for (std::size_t q = 0; q < bank.kernel_area(); ++q) ker[q] /= sum;
    }
  return bank;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

template <typename F>
double time_ms(F&& fn, int reps) {
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const std::string& name, double ref_ms, double fast_ms, double err) {
  std::printf("%-28s %12.2f %12.2f %9.1fx %12.2e\n", name.c_str(), ref_ms, fast_ms,
              ref_ms / fast_ms, err);
}

}  // namespace

int main() {
  std::printf("%-28s %12s %12s %9s %12s\n", "kernel", "serial ms", "fast ms", "speedup",
              "max |diff|");

  Rand rng(17);
  {
    const int h = 96, w = 96, c = 8, n = 4, k = 11;
    HyperspectralCube cube = random_cube(h, w, c, rng);
    PsfStack bank = random_bank(n, c, k, rng);
    CropSpec crop = CropSpec::centered(h, w, k);

    FocalStack fast, slow;
    double t_fast = time_ms([&] { fast = apply_forward(cube, bank, crop); }, 5);
    double t_slow = time_ms([&] { slow = ref::apply_forward_naive(cube, bank, crop); }, 1);
    row("forward (96x96x8, K=11)", t_slow, t_fast, max_abs_diff(fast.data, slow.data));

    FocalStack y = fast;
    for (double& v : y.data) v = rng.next();
    HyperspectralCube bfast, bslow;
    double ta_fast = time_ms([&] { bfast = apply_adjoint(y, bank, crop); }, 5);
    double ta_slow = time_ms([&] { bslow = ref::apply_adjoint_naive(y, bank, crop); }, 1);
    row("adjoint (96x96x8, K=11)", ta_slow, ta_fast, max_abs_diff(bfast.data, bslow.data));
  }

  {
    const int h = 128, w = 128;
    HyperspectralCube a = random_cube(h, w, 4, rng);
    HyperspectralCube b = a;
    for (double& v : b.data) v = std::min(1.0, std::max(0.0, v + 0.1 * (rng.next() - 0.5)));
    double sfast = 0.0, sslow = 0.0;
    double t_fast = time_ms([&] { sfast = ssim(a, b); }, 3);
    double t_slow = time_ms([&] { sslow = ref::ssim_direct(a, b); }, 1);
    row("ssim (128x128x4)", t_slow, t_fast, std::abs(sfast - sslow));
  }

  {
    const int h = 24, w = 24, c = 6, n = 3, k = 5, v = 4;
    HyperspectralCube scene = random_cube(h, w, c, rng);
    PsfStack bank = random_bank(n, c, k, rng);
    CropSpec crop = CropSpec::centered(h, w, k);
    FocalStack y = apply_forward(scene, bank, crop);

    SpectralBasis basis;
    basis.dim = v;
    basis.channels = c;
    basis.rows.assign(static_cast<std::size_t>(v) * c, 0.0);
    for (int q = 0; q < v; ++q) basis.rows[static_cast<std::size_t>(q) * c + q] = 1.0;

    SolverConfig cfg;
    cfg.mu1 = 0.8;
    cfg.mu2 = 1e-4;
    cfg.max_iters = 9;
    cfg.step_tolerance = 1e-14;
    cfg.divergence_factor = 1e18;
    cfg.halving_check_iter = 1 << 30;

    ReconstructionResult fast;
    ref::DenseAdmmResult slow;
    double t_fast = time_ms([&] { fast = run_admm(y, bank, basis, cfg); }, 3);
    double t_slow = time_ms([&] { slow = ref::run_admm_dense(y, bank, basis, cfg); }, 1);
    row("admm 9 iters (24x24x6, v=4)", t_slow, t_fast, max_abs_diff(fast.cube.data, slow.cube.data));
  }

  std::printf("threads: %d\n", max_threads());
  return 0;
}
