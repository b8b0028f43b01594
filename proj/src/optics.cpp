#include "csweep/optics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "csweep/numeric.hpp"

namespace csweep {

namespace {

void check_dispersion(const LensDispersion& lens, const char* what) {
  if (lens.wavelengths_nm.empty() || lens.wavelengths_nm.size() != lens.focal_lengths_mm.size())
    throw std::invalid_argument(std::string(what) + ": empty or mismatched dispersion table");
  for (std::size_t i = 0; i < lens.wavelengths_nm.size(); ++i) {
    if (i && !(lens.wavelengths_nm[i] > lens.wavelengths_nm[i - 1]))
      throw std::invalid_argument(std::string(what) + ": wavelengths must be strictly increasing");
    double f = lens.focal_lengths_mm[i];
    if (!(f > 0.0) || !std::isfinite(f))
      throw std::invalid_argument(std::string(what) + ": focal lengths must be positive and finite");
  }
}

}  // namespace

double LensDispersion::focal_length_at(double wavelength_nm) const {
  check_dispersion(*this, "focal_length_at");
  const auto& xs = wavelengths_nm;
  if (wavelength_nm < xs.front() || wavelength_nm > xs.back()) {
    std::ostringstream os;
    os << "focal_length_at: wavelength " << wavelength_nm << " nm outside dispersion table ["
       << xs.front() << ", " << xs.back() << "]";
    throw std::invalid_argument(os.str());
  }
  auto it = std::lower_bound(xs.begin(), xs.end(), wavelength_nm);
  if (it == xs.begin()) return focal_lengths_mm.front();
  std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  std::size_t lo = hi - 1;
  double t = (wavelength_nm - xs[lo]) / (xs[hi] - xs[lo]);
  return focal_lengths_mm[lo] + t * (focal_lengths_mm[hi] - focal_lengths_mm[lo]);
}

LensDispersion read_dispersion_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dispersion table '" + path + "'");
  LensDispersion lens;
  std::string line;
  bool first = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double w, f;
    if (ls >> w >> f) {
      if (first)
        throw std::runtime_error("dispersion table '" + path + "' is missing its header line");
      lens.wavelengths_nm.push_back(w);
      lens.focal_lengths_mm.push_back(f);
    } else if (first) {
      first = false;  // header consumed
    } else {
      std::ostringstream os;
      os << "malformed row at line " << lineno << " of '" << path << "'";
      throw std::runtime_error(os.str());
    }
  }
  if (first) throw std::runtime_error("dispersion table '" + path + "' is empty");
  check_dispersion(lens, ("read_dispersion_csv('" + path + "')").c_str());
  return lens;
}

double combined_focal_length(double f1_mm, double f2_mm, double separation_mm) {
  double power = 1.0 / f1_mm + 1.0 / f2_mm - separation_mm / (f1_mm * f2_mm);
  if (!(power > 0.0) || !std::isfinite(power))
    throw std::invalid_argument("combined_focal_length: pair has non-positive optical power");
  return 1.0 / power;
}

std::vector<double> focal_shift_curve(const OpticalConfig& cfg,
                                      const std::vector<double>& wavelengths_nm) {
  check_dispersion(cfg.lens1, "focal_shift_curve: lens1");
  check_dispersion(cfg.lens2, "focal_shift_curve: lens2");
  double f_ref = combined_focal_length(cfg.lens1.focal_length_at(cfg.reference_wavelength_nm),
                                       cfg.lens2.focal_length_at(cfg.reference_wavelength_nm),
                                       cfg.separation_mm);
  std::vector<double> curve;
  curve.reserve(wavelengths_nm.size());
  for (double w : wavelengths_nm) {
    double f = combined_focal_length(cfg.lens1.focal_length_at(w), cfg.lens2.focal_length_at(w),
                                     cfg.separation_mm);
    curve.push_back(f - f_ref);
  }
  return curve;
}

std::vector<double> select_lens_positions(const std::vector<double>& shift_curve_mm, int count) {
  if (count < 1) throw std::invalid_argument("select_lens_positions: count must be at least 1");
  if (shift_curve_mm.empty()) throw std::invalid_argument("select_lens_positions: empty curve");
  double lo = *std::min_element(shift_curve_mm.begin(), shift_curve_mm.end());
  double hi = *std::max_element(shift_curve_mm.begin(), shift_curve_mm.end());
  if (count == 1) return {0.5 * (lo + hi)};
  if (!(hi > lo))
    throw std::invalid_argument(
        "select_lens_positions: shift curve is constant, nothing to sweep over");
  std::vector<double> pos(count);
  for (int i = 0; i < count; ++i)
    pos[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return pos;
}

double depth_of_field(double aperture_number, double coc_m, double subject_distance_m,
                      double focal_length_m) {
  if (!(aperture_number > 0.0) || !(subject_distance_m > 0.0) || !(focal_length_m > 0.0) ||
      coc_m < 0.0)
    throw std::invalid_argument("depth_of_field: arguments out of range");
  return 2.0 * aperture_number * coc_m * subject_distance_m * subject_distance_m /
         (focal_length_m * focal_length_m);
}

double defocus_blur_rate(const OpticalConfig& cfg) {
  double f_ref = combined_focal_length(cfg.lens1.focal_length_at(cfg.reference_wavelength_nm),
                                       cfg.lens2.focal_length_at(cfg.reference_wavelength_nm),
                                       cfg.separation_mm);
  if (!(cfg.aperture_number > 0.0))
    throw std::invalid_argument("defocus_blur_rate: aperture number must be positive");
  if (!(cfg.pixel_pitch_um > 0.0))
    throw std::invalid_argument("defocus_blur_rate: pixel pitch must be positive");
  double s_mm = cfg.scene_distance_m * 1000.0;
  if (!(s_mm > f_ref))
    throw std::invalid_argument("defocus_blur_rate: scene distance inside the focal length");
  double aperture_radius_mm = f_ref / (2.0 * cfg.aperture_number);
  double image_mm = 1.0 / (1.0 / f_ref - 1.0 / s_mm);
  double pitch_mm = cfg.pixel_pitch_um / 1000.0;
  return aperture_radius_mm / (image_mm * pitch_mm);
}

namespace {

// Fraction of a pixel at offset (du, dv) from the disk center covered by a
// disk of radius r, from a 16x16 subsample grid. The count is an integer, so
// the value is exactly invariant under the square's symmetry group.
double disk_coverage(int du, int dv, double r) {
  const double r2 = r * r;
  int hits = 0;
  for (int a = 0; a < 16; ++a) {
    double x = du + (a + 0.5) / 16.0 - 0.5;
    for (int b = 0; b < 16; ++b) {
      double y = dv + (b + 0.5) / 16.0 - 0.5;
      if (x * x + y * y <= r2) ++hits;
    }
  }
  return hits / 256.0;
}

}  // namespace

std::vector<double> synthesize_psf(const OpticalConfig& cfg, double wavelength_nm,
                                   double lens_position_mm, int kernel_size) {
  if (kernel_size < 1 || kernel_size % 2 == 0)
    throw std::invalid_argument("synthesize_psf: kernel size must be odd and positive");
  const int K = kernel_size;
  const int c = (K - 1) / 2;
  std::vector<double> kernel(static_cast<std::size_t>(K) * K, 0.0);

  double shift = focal_shift_curve(cfg, {wavelength_nm})[0];
  double dz = shift - lens_position_mm;
  double r = defocus_blur_rate(cfg) * std::abs(dz);

  if (r > 0.0) {
    int needed = 2 * (static_cast<int>(std::ceil(r + 0.5)) + 2) + 1;
    if (needed > K) {
      std::ostringstream os;
      os << "synthesize_psf: blur radius " << r << " px needs kernel size " << needed
         << ", larger than the given " << K;
      throw std::invalid_argument(os.str());
    }
  }

  std::vector<double> disk(static_cast<std::size_t>(K) * K, 0.0);
  double disk_sum = 0.0;
  if (r > 0.0) {
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b) {
        double v = disk_coverage(a - c, b - c, r);
        disk[static_cast<std::size_t>(a) * K + b] = v;
        disk_sum += v;
      }
  }
  if (disk_sum == 0.0) {
    // in focus (or a disk thinner than the subsample spacing): delta kernel
    kernel[static_cast<std::size_t>(c) * K + c] = 1.0;
    return kernel;
  }

  // Anti-aliasing blur, sigma 0.5 px on a radius-2 support
  double wt[5];
  double wt_sum = 0.0;
  for (int d = -2; d <= 2; ++d) {
    wt[d + 2] = std::exp(-2.0 * d * d);
    wt_sum += wt[d + 2];
  }
  for (double& w : wt) w /= wt_sum;

  auto conv_at = [&](int a, int b) {
    double s = 0.0;
    for (int da = -2; da <= 2; ++da) {
      int aa = a + da;
      if (aa < 0 || aa >= K) continue;
      for (int db = -2; db <= 2; ++db) {
        int bb = b + db;
        if (bb < 0 || bb >= K) continue;
        s += wt[da + 2] * wt[db + 2] * disk[static_cast<std::size_t>(aa) * K + bb];
      }
    }
    return s;
  };

  // Evaluate one canonical pixel per symmetry orbit and mirror the value, so
  // the kernel is exactly equal to its rotations and reflections.
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) {
      int u = std::abs(a - c), v = std::abs(b - c);
      if (u > v) std::swap(u, v);
      kernel[static_cast<std::size_t>(a) * K + b] = conv_at(c + u, c + v);
    }

  double total = pairwise_sum(kernel);
  for (double& k : kernel) k /= total;
  return kernel;
}

PsfStack build_psf_stack(const OpticalConfig& cfg, const std::vector<double>& lens_positions_mm,
                         const std::vector<double>& wavelengths_nm) {
  if (lens_positions_mm.empty() || wavelengths_nm.empty())
    throw std::invalid_argument("build_psf_stack: empty position or wavelength grid");
  for (std::size_t i = 1; i < lens_positions_mm.size(); ++i)
    if (!(lens_positions_mm[i] > lens_positions_mm[i - 1]))
      throw std::invalid_argument("build_psf_stack: lens positions must be strictly increasing");

  std::vector<double> shifts = focal_shift_curve(cfg, wavelengths_nm);
  double alpha = defocus_blur_rate(cfg);

  double r_max = 0.0;
  for (double z : lens_positions_mm)
    for (double s : shifts) r_max = std::max(r_max, alpha * std::abs(s - z));

  int K = 1;
  if (r_max > 0.0) K = 2 * (static_cast<int>(std::ceil(r_max + 0.5)) + 2) + 1;
  if (K > cfg.max_kernel_px) {
    std::ostringstream os;
    os << "build_psf_stack: blur radius " << r_max << " px needs kernel size " << K
       << ", above the configured maximum " << cfg.max_kernel_px;
    throw std::invalid_argument(os.str());
  }

  PsfStack psfs;
  psfs.count = static_cast<int>(lens_positions_mm.size());
  psfs.channels = static_cast<int>(wavelengths_nm.size());
  psfs.kernel_size = K;
  psfs.lens_positions_mm = lens_positions_mm;
  psfs.wavelengths_nm = wavelengths_nm;
  psfs.kernels.resize(psfs.kernel_area() * static_cast<std::size_t>(psfs.count) * psfs.channels);

#pragma omp parallel for collapse(2) schedule(static)
  for (int i = 0; i < psfs.count; ++i)
    for (int j = 0; j < psfs.channels; ++j) {
      std::vector<double> k =
          synthesize_psf(cfg, wavelengths_nm[j], lens_positions_mm[i], K);
      std::copy(k.begin(), k.end(), psfs.kernel(i, j));
    }

  require_valid(validate(psfs), "build_psf_stack");
  return psfs;
}

}  // namespace csweep
