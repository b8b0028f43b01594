#include "csweep/forward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "csweep/fft.hpp"
#include "csweep/rng.hpp"

namespace csweep {

CropSpec CropSpec::centered(int height, int width, int kernel_size) {
  if (height < 1 || width < 1) throw std::invalid_argument("CropSpec: dimensions must be positive");
  if (kernel_size < 1 || kernel_size % 2 == 0)
    throw std::invalid_argument("CropSpec: kernel size must be odd and positive");
  CropSpec c;
  c.padded_height = height + kernel_size - 1;
  c.padded_width = width + kernel_size - 1;
  c.out_height = height;
  c.out_width = width;
  c.row_offset = (kernel_size - 1) / 2;
  c.col_offset = (kernel_size - 1) / 2;
  return c;
}

CropSpec CropSpec::full(int padded_height, int padded_width) {
  if (padded_height < 1 || padded_width < 1)
    throw std::invalid_argument("CropSpec: dimensions must be positive");
  CropSpec c;
  c.padded_height = padded_height;
  c.padded_width = padded_width;
  c.out_height = padded_height;
  c.out_width = padded_width;
  return c;
}

void check_crop(const CropSpec& c) {
  if (c.padded_height < 1 || c.padded_width < 1 || c.out_height < 1 || c.out_width < 1 ||
      c.row_offset < 0 || c.col_offset < 0 ||
      c.row_offset + c.out_height > c.padded_height ||
      c.col_offset + c.out_width > c.padded_width)
    throw std::invalid_argument("CropSpec: window does not fit inside the padded grid");
}

HyperspectralCube pad_cube(const HyperspectralCube& cube, int kernel_size) {
  require_valid(validate(cube), "pad_cube");
  if (kernel_size < 1 || kernel_size % 2 == 0)
    throw std::invalid_argument("pad_cube: kernel size must be odd and positive");
  const int p = (kernel_size - 1) / 2;
  HyperspectralCube out;
  out.height = cube.height + kernel_size - 1;
  out.width = cube.width + kernel_size - 1;
  out.channels = cube.channels;
  out.wavelengths_nm = cube.wavelengths_nm;
  out.data.assign(out.plane_size() * out.channels, 0.0);
  for (int c = 0; c < cube.channels; ++c)
    for (int r = 0; r < cube.height; ++r) {
      const double* src = cube.plane(c) + static_cast<std::size_t>(r) * cube.width;
      double* dst = out.plane(c) + static_cast<std::size_t>(r + p) * out.width + p;
      std::copy(src, src + cube.width, dst);
    }
  return out;
}

std::vector<std::complex<double>> compute_otfs(const PsfStack& psfs, int padded_height,
                                               int padded_width) {
  require_valid(validate(psfs), "compute_otfs");
  const int K = psfs.kernel_size;
  if (padded_height < K || padded_width < K)
    throw std::invalid_argument("compute_otfs: padded grid smaller than the kernel");
  const std::size_t plane = static_cast<std::size_t>(padded_height) * padded_width;
  const int planes = psfs.count * psfs.channels;
  std::vector<std::complex<double>> otf(plane * planes);
  Fft2D fft(padded_height, padded_width);
  const int p = (K - 1) / 2;

#pragma omp parallel
  {
    std::vector<std::complex<double>> buf(plane);
#pragma omp for schedule(static)
    for (int q = 0; q < planes; ++q) {
      std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
      const double* k = psfs.kernels.data() + static_cast<std::size_t>(q) * psfs.kernel_area();
      for (int a = 0; a < K; ++a) {
        int rr = (a - p) % padded_height;
        if (rr < 0) rr += padded_height;
        for (int b = 0; b < K; ++b) {
          int cc = (b - p) % padded_width;
          if (cc < 0) cc += padded_width;
          buf[static_cast<std::size_t>(rr) * padded_width + cc] = k[static_cast<std::size_t>(a) * K + b];
        }
      }
      fft.forward(buf.data(), otf.data() + static_cast<std::size_t>(q) * plane);
    }
  }
  return otf;
}

namespace {

void check_geometry(int scene_h, int scene_w, const PsfStack& psfs, const CropSpec& crop) {
  check_crop(crop);
  if (crop.padded_height != scene_h + psfs.kernel_size - 1 ||
      crop.padded_width != scene_w + psfs.kernel_size - 1) {
    std::ostringstream os;
    os << "padded grid " << crop.padded_height << "x" << crop.padded_width
       << " does not match scene " << scene_h << "x" << scene_w << " under kernel size "
       << psfs.kernel_size;
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

FocalStack apply_forward(const HyperspectralCube& cube, const PsfStack& psfs,
                         const CropSpec& crop) {
  require_valid(validate(cube), "apply_forward");
  require_valid(validate(psfs), "apply_forward");
  if (cube.channels != psfs.channels)
    throw std::invalid_argument("apply_forward: cube and kernel bank channel counts differ");
  check_geometry(cube.height, cube.width, psfs, crop);

  const int ph = crop.padded_height, pw = crop.padded_width;
  const std::size_t plane = static_cast<std::size_t>(ph) * pw;
  const int C = psfs.channels, N = psfs.count;

  std::vector<std::complex<double>> otf = compute_otfs(psfs, ph, pw);
  HyperspectralCube padded = pad_cube(cube, psfs.kernel_size);
  Fft2D fft(ph, pw);

  std::vector<std::complex<double>> xhat(plane * C);
#pragma omp parallel
  {
    std::vector<std::complex<double>> buf(plane);
#pragma omp for schedule(static)
    for (int j = 0; j < C; ++j) {
      const double* src = padded.plane(j);
      for (std::size_t q = 0; q < plane; ++q) buf[q] = src[q];
      fft.forward(buf.data(), xhat.data() + static_cast<std::size_t>(j) * plane);
    }
  }

  FocalStack out;
  out.height = crop.out_height;
  out.width = crop.out_width;
  out.count = N;
  out.lens_positions_mm = psfs.lens_positions_mm;
  out.data.resize(out.plane_size() * N);

#pragma omp parallel
  {
    std::vector<std::complex<double>> acc(plane), spatial(plane);
#pragma omp for schedule(static)
    for (int i = 0; i < N; ++i) {
      std::fill(acc.begin(), acc.end(), std::complex<double>(0.0, 0.0));
      for (int j = 0; j < C; ++j) {  // fixed channel order keeps sums deterministic
        const std::complex<double>* h =
            otf.data() + (static_cast<std::size_t>(i) * C + j) * plane;
        const std::complex<double>* x = xhat.data() + static_cast<std::size_t>(j) * plane;
        for (std::size_t q = 0; q < plane; ++q) acc[q] += h[q] * x[q];
      }
      fft.inverse(acc.data(), spatial.data());
      double* dst = out.plane(i);
      for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c)
          dst[static_cast<std::size_t>(r) * out.width + c] =
              spatial[static_cast<std::size_t>(r + crop.row_offset) * pw + c + crop.col_offset]
                  .real();
    }
  }
  return out;
}

HyperspectralCube apply_adjoint(const FocalStack& stack, const PsfStack& psfs,
                                const CropSpec& crop) {
  require_valid(validate(stack), "apply_adjoint");
  require_valid(validate(psfs), "apply_adjoint");
  if (stack.count != psfs.count)
    throw std::invalid_argument("apply_adjoint: stack and kernel bank measurement counts differ");
  if (stack.height != crop.out_height || stack.width != crop.out_width)
    throw std::invalid_argument("apply_adjoint: stack does not match the crop window");
  const int scene_h = crop.padded_height - psfs.kernel_size + 1;
  const int scene_w = crop.padded_width - psfs.kernel_size + 1;
  check_geometry(scene_h, scene_w, psfs, crop);

  const int ph = crop.padded_height, pw = crop.padded_width;
  const std::size_t plane = static_cast<std::size_t>(ph) * pw;
  const int C = psfs.channels, N = psfs.count;
  const int p = (psfs.kernel_size - 1) / 2;

  std::vector<std::complex<double>> otf = compute_otfs(psfs, ph, pw);
  Fft2D fft(ph, pw);

  // embed each measurement at the crop offset, then transform
  std::vector<std::complex<double>> yhat(plane * N);
#pragma omp parallel
  {
    std::vector<std::complex<double>> buf(plane);
#pragma omp for schedule(static)
    for (int i = 0; i < N; ++i) {
      std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
      const double* src = stack.plane(i);
      for (int r = 0; r < stack.height; ++r)
        for (int c = 0; c < stack.width; ++c)
          buf[static_cast<std::size_t>(r + crop.row_offset) * pw + c + crop.col_offset] =
              src[static_cast<std::size_t>(r) * stack.width + c];
      fft.forward(buf.data(), yhat.data() + static_cast<std::size_t>(i) * plane);
    }
  }

  HyperspectralCube out;
  out.height = scene_h;
  out.width = scene_w;
  out.channels = C;
  out.wavelengths_nm = psfs.wavelengths_nm;
  out.data.resize(out.plane_size() * C);

#pragma omp parallel
  {
    std::vector<std::complex<double>> acc(plane), spatial(plane);
#pragma omp for schedule(static)
    for (int j = 0; j < C; ++j) {
      std::fill(acc.begin(), acc.end(), std::complex<double>(0.0, 0.0));
      for (int i = 0; i < N; ++i) {  // fixed measurement order keeps sums deterministic
        const std::complex<double>* h =
            otf.data() + (static_cast<std::size_t>(i) * C + j) * plane;
        const std::complex<double>* y = yhat.data() + static_cast<std::size_t>(i) * plane;
        for (std::size_t q = 0; q < plane; ++q) acc[q] += std::conj(h[q]) * y[q];
      }
      fft.inverse(acc.data(), spatial.data());
      double* dst = out.plane(j);
      for (int r = 0; r < scene_h; ++r)
        for (int c = 0; c < scene_w; ++c)
          dst[static_cast<std::size_t>(r) * scene_w + c] =
              spatial[static_cast<std::size_t>(r + p) * pw + c + p].real();
    }
  }
  return out;
}

LightEfficiency light_efficiency(const std::vector<double>& component_efficiencies,
                                 int measurement_count) {
  if (measurement_count < 1)
    throw std::invalid_argument("light_efficiency: measurement count must be at least 1");
  double product = 1.0;
  for (double e : component_efficiencies) {
    if (!(e > 0.0 && e <= 1.0))
      throw std::invalid_argument("light_efficiency: component efficiencies must be in (0, 1]");
    product *= e;
  }
  LightEfficiency out;
  out.per_exposure = product / static_cast<double>(measurement_count);
  out.effective = product;
  return out;
}

FocalStack simulate_measurement(const HyperspectralCube& cube, const PsfStack& psfs,
                                const CropSpec& crop, const ExposureModel& model,
                                const std::vector<double>& response_weights) {
  if (!(model.photon_flux > 0.0) || !(model.total_exposure_s > 0.0) ||
      !(model.pixel_area_m2 > 0.0) || !(model.light_efficiency > 0.0))
    throw std::invalid_argument("simulate_measurement: exposure model fields must be positive");

  FocalStack clean;
  if (response_weights.empty()) {
    clean = apply_forward(cube, psfs, crop);
  } else {
    if (static_cast<int>(response_weights.size()) != cube.channels)
      throw std::invalid_argument("simulate_measurement: response weight count mismatch");
    for (double w : response_weights)
      if (!(w > 0.0 && w <= 1.0))
        throw std::invalid_argument("simulate_measurement: response weights must be in (0, 1]");
    HyperspectralCube weighted = cube;
    for (int j = 0; j < cube.channels; ++j) {
      double* pl = weighted.plane(j);
      for (std::size_t q = 0; q < weighted.plane_size(); ++q) pl[q] *= response_weights[j];
    }
    clean = apply_forward(weighted, psfs, crop);
  }

  // photons per unit of normalized radiance at one pixel in one exposure
  const double scale = model.photon_flux * model.pixel_area_m2 *
                       (model.total_exposure_s / static_cast<double>(clean.count)) *
                       model.light_efficiency;

  const std::size_t plane = clean.plane_size();
  for (int i = 0; i < clean.count; ++i) {
    double* pl = clean.plane(i);
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < static_cast<long long>(plane); ++q) {
      double mean = pl[q] * scale;
      if (mean < 0.0) mean = 0.0;  // convolution roundoff on dark pixels
      double u = counter_uniform(model.seed, static_cast<std::uint64_t>(i),
                                 static_cast<std::uint64_t>(q));
      pl[q] = sample_poisson(mean, u) / scale;
    }
  }
  return clean;
}

}  // namespace csweep
