#include "csweep/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "color_detail.hpp"
#include "csweep/numeric.hpp"

namespace csweep {

namespace {

constexpr double kPi = std::numbers::pi;

void check_same_shape(const HyperspectralCube& a, const HyperspectralCube& b, const char* what) {
  require_valid(validate(a), what);
  require_valid(validate(b), what);
  if (a.height != b.height || a.width != b.width || a.channels != b.channels)
    throw std::invalid_argument(std::string(what) + ": cube shapes differ");
}

}  // namespace

double psnr(const HyperspectralCube& recon, const HyperspectralCube& truth, double peak) {
  check_same_shape(recon, truth, "psnr");
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be positive");
  std::vector<double> diff(recon.data.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = recon.data[i] - truth.data[i];
  double mse = sum_squares(diff) / static_cast<double>(diff.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const HyperspectralCube& recon, const HyperspectralCube& truth) {
  check_same_shape(recon, truth, "ssim");
  constexpr int W = 11;
  if (recon.height < W || recon.width < W)
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");

  double win[W];
  {
    double s = 0.0;
    for (int i = 0; i < W; ++i) {
      double d = i - (W - 1) / 2;
      win[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
      s += win[i];
    }
    for (double& w : win) w /= s;
  }
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;  // dynamic range 1

  const int oh = recon.height - W + 1, ow = recon.width - W + 1;
  std::vector<double> values(static_cast<std::size_t>(oh) * ow);
  std::vector<double> channel_means(recon.channels);

  for (int ch = 0; ch < recon.channels; ++ch) {
    const double* x = recon.plane(ch);
    const double* y = truth.plane(ch);
#pragma omp parallel for schedule(static)
    for (long long r = 0; r < oh; ++r) {
      for (int c = 0; c < ow; ++c) {
        double mx = 0.0, my = 0.0, xx = 0.0, yy = 0.0, xy = 0.0;
        for (int a = 0; a < W; ++a) {
          const double* xr = x + (r + a) * recon.width + c;
          const double* yr = y + (r + a) * recon.width + c;
          for (int b = 0; b < W; ++b) {
            double w = win[a] * win[b];
            mx += w * xr[b];
            my += w * yr[b];
            xx += w * xr[b] * xr[b];
            yy += w * yr[b] * yr[b];
            xy += w * xr[b] * yr[b];
          }
        }
        double vx = xx - mx * mx, vy = yy - my * my, cov = xy - mx * my;
        values[static_cast<std::size_t>(r) * ow + c] =
            ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
            ((mx * mx + my * my + c1) * (vx + vy + c2));
      }
    }
    channel_means[ch] = pairwise_sum(values) / static_cast<double>(values.size());
  }
  return pairwise_sum(channel_means) / static_cast<double>(recon.channels);
}

double sam_degrees(const HyperspectralCube& recon, const HyperspectralCube& truth) {
  check_same_shape(recon, truth, "sam_degrees");
  const std::size_t hw = recon.plane_size();
  const int C = recon.channels;
  std::vector<double> angles;
  angles.reserve(hw);
  for (std::size_t q = 0; q < hw; ++q) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (int j = 0; j < C; ++j) {
      double a = recon.data[static_cast<std::size_t>(j) * hw + q];
      double b = truth.data[static_cast<std::size_t>(j) * hw + q];
      dot += a * b;
      na += a * a;
      nb += b * b;
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na < 1e-8 || nb < 1e-8) continue;  // undefined on (near-)black spectra
    double cosv = std::clamp(dot / (na * nb), -1.0, 1.0);
    angles.push_back(std::acos(cosv) * 180.0 / kPi);
  }
  if (angles.empty()) return 0.0;
  return pairwise_sum(angles) / static_cast<double>(angles.size());
}

double ciede2000(const Lab& x, const Lab& y) {
  auto rad = [](double deg) { return deg * kPi / 180.0; };
  auto deg = [](double r) { return r * 180.0 / kPi; };

  const double c1 = std::hypot(x.a, x.b);
  const double c2 = std::hypot(y.a, y.b);
  const double cbar = 0.5 * (c1 + c2);
  const double cbar7 = std::pow(cbar, 7.0);
  const double g = 0.5 * (1.0 - std::sqrt(cbar7 / (cbar7 + std::pow(25.0, 7.0))));

  const double a1p = (1.0 + g) * x.a;
  const double a2p = (1.0 + g) * y.a;
  const double c1p = std::hypot(a1p, x.b);
  const double c2p = std::hypot(a2p, y.b);

  auto hue = [&](double a, double b) {
    if (a == 0.0 && b == 0.0) return 0.0;
    double h = deg(std::atan2(b, a));
    return h < 0.0 ? h + 360.0 : h;
  };
  const double h1p = hue(a1p, x.b);
  const double h2p = hue(a2p, y.b);

  const double dlp = y.l - x.l;
  const double dcp = c2p - c1p;

  double dhp = 0.0;
  if (c1p * c2p != 0.0) {
    double d = h2p - h1p;
    if (d > 180.0) d -= 360.0;
    else if (d < -180.0) d += 360.0;
    dhp = d;
  }
  const double dHp = 2.0 * std::sqrt(c1p * c2p) * std::sin(rad(dhp) / 2.0);

  const double lbar = 0.5 * (x.l + y.l);
  const double cbarp = 0.5 * (c1p + c2p);

  double hbar = h1p + h2p;
  if (c1p * c2p != 0.0) {
    double diff = std::abs(h1p - h2p);
    if (diff <= 180.0)
      hbar = 0.5 * (h1p + h2p);
    else if (h1p + h2p < 360.0)
      hbar = 0.5 * (h1p + h2p + 360.0);
    else
      hbar = 0.5 * (h1p + h2p - 360.0);
  }

  const double t = 1.0 - 0.17 * std::cos(rad(hbar - 30.0)) + 0.24 * std::cos(rad(2.0 * hbar)) +
                   0.32 * std::cos(rad(3.0 * hbar + 6.0)) - 0.20 * std::cos(rad(4.0 * hbar - 63.0));
  const double dtheta = 30.0 * std::exp(-((hbar - 275.0) / 25.0) * ((hbar - 275.0) / 25.0));
  const double cbarp7 = std::pow(cbarp, 7.0);
  const double rc = 2.0 * std::sqrt(cbarp7 / (cbarp7 + std::pow(25.0, 7.0)));
  const double lterm = (lbar - 50.0) * (lbar - 50.0);
  const double sl = 1.0 + 0.015 * lterm / std::sqrt(20.0 + lterm);
  const double sc = 1.0 + 0.045 * cbarp;
  const double sh = 1.0 + 0.015 * cbarp * t;
  const double rt = -std::sin(rad(2.0 * dtheta)) * rc;

  const double tl = dlp / sl, tc = dcp / sc, th = dHp / sh;
  return std::sqrt(tl * tl + tc * tc + th * th + rt * tc * th);
}

Lab srgb_to_lab(double r, double g, double b) {
  std::array<double, 3> lin = {detail::srgb_decode(r), detail::srgb_decode(g),
                               detail::srgb_decode(b)};
  std::array<double, 3> xyz = detail::apply(detail::rgb_to_xyz(), lin);
  return detail::xyz_to_lab(xyz[0], xyz[1], xyz[2]);
}

namespace {

std::vector<double> interp_table(const std::vector<double>& xs, const std::vector<double>& ys,
                                 const std::vector<double>& targets, const char* what) {
  std::vector<double> out;
  out.reserve(targets.size());
  for (double w : targets) {
    if (w < xs.front() || w > xs.back()) {
      std::ostringstream os;
      os << what << ": wavelength " << w << " nm outside the table range [" << xs.front() << ", "
         << xs.back() << "]";
      throw std::invalid_argument(os.str());
    }
    auto it = std::lower_bound(xs.begin(), xs.end(), w);
    if (it == xs.begin()) {
      out.push_back(ys.front());
      continue;
    }
    std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    std::size_t lo = hi - 1;
    double t = (w - xs[lo]) / (xs[hi] - xs[lo]);
    out.push_back(ys[lo] + t * (ys[hi] - ys[lo]));
  }
  return out;
}

void check_color_match(const ColorMatch& cm) {
  const std::size_t n = cm.wavelengths_nm.size();
  if (n < 1 || cm.xbar.size() != n || cm.ybar.size() != n || cm.zbar.size() != n ||
      cm.illuminant.size() != n)
    throw std::invalid_argument("color match tables have mismatched lengths");
  for (std::size_t i = 1; i < n; ++i)
    if (!(cm.wavelengths_nm[i] > cm.wavelengths_nm[i - 1]))
      throw std::invalid_argument("color match wavelengths must be strictly increasing");
}

}  // namespace

std::vector<double> hsi_to_xyz(const HyperspectralCube& cube, const ColorMatch& cm) {
  require_valid(validate(cube), "hsi_to_xyz");
  check_color_match(cm);
  const int C = cube.channels;

  std::vector<double> xb = interp_table(cm.wavelengths_nm, cm.xbar, cube.wavelengths_nm, "hsi_to_xyz");
  std::vector<double> yb = interp_table(cm.wavelengths_nm, cm.ybar, cube.wavelengths_nm, "hsi_to_xyz");
  std::vector<double> zb = interp_table(cm.wavelengths_nm, cm.zbar, cube.wavelengths_nm, "hsi_to_xyz");
  std::vector<double> il = interp_table(cm.wavelengths_nm, cm.illuminant, cube.wavelengths_nm, "hsi_to_xyz");

  // trapezoid weights over the cube's wavelength grid
  std::vector<double> t(C, 1.0);
  if (C > 1) {
    t[0] = 0.5 * (cube.wavelengths_nm[1] - cube.wavelengths_nm[0]);
    t[C - 1] = 0.5 * (cube.wavelengths_nm[C - 1] - cube.wavelengths_nm[C - 2]);
    for (int j = 1; j + 1 < C; ++j)
      t[j] = 0.5 * (cube.wavelengths_nm[j + 1] - cube.wavelengths_nm[j - 1]);
  }

  std::vector<double> wx(C), wy(C), wz(C);
  double whx = 0.0, why = 0.0, whz = 0.0;
  for (int j = 0; j < C; ++j) {
    wx[j] = t[j] * il[j] * xb[j];
    wy[j] = t[j] * il[j] * yb[j];
    wz[j] = t[j] * il[j] * zb[j];
    whx += wx[j];
    why += wy[j];
    whz += wz[j];
  }
  if (!(whx > 0.0) || !(why > 0.0) || !(whz > 0.0))
    throw std::invalid_argument("hsi_to_xyz: color match has zero white response on this grid");

  const auto& white = detail::white_xyz();
  for (int j = 0; j < C; ++j) {
    wx[j] *= white[0] / whx;
    wy[j] *= white[1] / why;
    wz[j] *= white[2] / whz;
  }

  const std::size_t hw = cube.plane_size();
  std::vector<double> xyz(3 * hw, 0.0);
  for (int j = 0; j < C; ++j) {
    const double* src = cube.plane(j);
    const double cx = wx[j], cy = wy[j], cz = wz[j];
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < static_cast<long long>(hw); ++q) {
      xyz[q] += cx * src[q];
      xyz[hw + q] += cy * src[q];
      xyz[2 * hw + q] += cz * src[q];
    }
  }
  return xyz;
}

RgbImage hsi_to_rgb(const HyperspectralCube& cube, const ColorMatch& cm) {
  std::vector<double> xyz = hsi_to_xyz(cube, cm);
  const std::size_t hw = cube.plane_size();
  RgbImage img;
  img.height = cube.height;
  img.width = cube.width;
  img.data.resize(3 * hw);
  const auto& m = detail::xyz_to_rgb();
#pragma omp parallel for schedule(static)
  for (long long q = 0; q < static_cast<long long>(hw); ++q) {
    std::array<double, 3> v = {xyz[q], xyz[hw + q], xyz[2 * hw + q]};
    std::array<double, 3> rgb = detail::apply(m, v);
    for (int p = 0; p < 3; ++p) {
      double e = detail::srgb_encode(std::max(0.0, rgb[p]));
      img.data[static_cast<std::size_t>(p) * hw + q] = std::clamp(e, 0.0, 1.0);
    }
  }
  return img;
}

double delta_e00_mean(const HyperspectralCube& recon, const HyperspectralCube& truth,
                      const ColorMatch& cm) {
  check_same_shape(recon, truth, "delta_e00_mean");
  RgbImage a = hsi_to_rgb(recon, cm);
  RgbImage b = hsi_to_rgb(truth, cm);
  const std::size_t hw = a.plane_size();
  std::vector<double> de(hw);
#pragma omp parallel for schedule(static)
  for (long long q = 0; q < static_cast<long long>(hw); ++q) {
    Lab la = srgb_to_lab(a.data[q], a.data[hw + q], a.data[2 * hw + q]);
    Lab lb = srgb_to_lab(b.data[q], b.data[hw + q], b.data[2 * hw + q]);
    de[q] = ciede2000(la, lb);
  }
  return pairwise_sum(de) / static_cast<double>(hw);
}

RgbImage compose_rgb_from_stack(const FocalStack& stack, int r_index, int g_index, int b_index,
                                const std::optional<PatchRect>& white_patch) {
  require_valid(validate(stack), "compose_rgb_from_stack");
  const int idx[3] = {r_index, g_index, b_index};
  for (int p = 0; p < 3; ++p)
    if (idx[p] < 0 || idx[p] >= stack.count) {
      std::ostringstream os;
      os << "compose_rgb_from_stack: plane index " << idx[p] << " outside [0, " << stack.count
         << ")";
      throw std::invalid_argument(os.str());
    }

  double gain[3] = {1.0, 1.0, 1.0};
  if (white_patch) {
    const PatchRect& w = *white_patch;
    if (w.row < 0 || w.col < 0 || w.height < 1 || w.width < 1 ||
        w.row + w.height > stack.height || w.col + w.width > stack.width)
      throw std::invalid_argument("compose_rgb_from_stack: white patch outside the image");
    for (int p = 0; p < 3; ++p) {
      std::vector<double> patch;
      patch.reserve(static_cast<std::size_t>(w.height) * w.width);
      const double* pl = stack.plane(idx[p]);
      for (int r = 0; r < w.height; ++r)
        for (int c = 0; c < w.width; ++c)
          patch.push_back(pl[static_cast<std::size_t>(w.row + r) * stack.width + w.col + c]);
      double mean = pairwise_sum(patch) / static_cast<double>(patch.size());
      if (!(mean > 0.0))
        throw std::invalid_argument("compose_rgb_from_stack: white patch mean is not positive");
      gain[p] = 1.0 / mean;
    }
  }

  RgbImage img;
  img.height = stack.height;
  img.width = stack.width;
  img.data.resize(3 * img.plane_size());
  for (int p = 0; p < 3; ++p) {
    const double* src = stack.plane(idx[p]);
    double* dst = img.plane(p);
    for (std::size_t q = 0; q < img.plane_size(); ++q) dst[q] = src[q] * gain[p];
  }
  return img;
}

}  // namespace csweep
