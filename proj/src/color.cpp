#include <Eigen/Dense>

#include <cmath>

#include "color_detail.hpp"
#include "csweep/metrics.hpp"

namespace csweep {

namespace {

// CIE 1931 2-degree standard observer and D65 relative spectral power,
// 380-780 nm at 10 nm. Columns: xbar, ybar, zbar, D65.
constexpr int kSamples = 41;
constexpr double kTable[kSamples][5] = {
    {380, 0.001368, 0.000039, 0.006450, 49.9755},
    {390, 0.004243, 0.000120, 0.020050, 54.6482},
    {400, 0.014310, 0.000396, 0.067850, 82.7549},
    {410, 0.043510, 0.001210, 0.207400, 91.4860},
    {420, 0.134380, 0.004000, 0.645600, 93.4318},
    {430, 0.283900, 0.011600, 1.385600, 86.6823},
    {440, 0.348280, 0.023000, 1.747060, 104.8650},
    {450, 0.336200, 0.038000, 1.772110, 117.0080},
    {460, 0.290800, 0.060000, 1.669200, 117.8120},
    {470, 0.195360, 0.090980, 1.287640, 114.8610},
    {480, 0.095640, 0.139020, 0.812950, 115.9230},
    {490, 0.032010, 0.208020, 0.465180, 108.8110},
    {500, 0.004900, 0.323000, 0.272000, 109.3540},
    {510, 0.009300, 0.503000, 0.158200, 107.8020},
    {520, 0.063270, 0.710000, 0.078250, 104.7900},
    {530, 0.165500, 0.862000, 0.042160, 107.6890},
    {540, 0.290400, 0.954000, 0.020300, 104.4050},
    {550, 0.433450, 0.994950, 0.008750, 104.0460},
    {560, 0.594500, 0.995000, 0.003900, 100.0000},
    {570, 0.762100, 0.952000, 0.002100, 96.3342},
    {580, 0.916300, 0.870000, 0.001650, 95.7880},
    {590, 1.026300, 0.757000, 0.001100, 88.6856},
    {600, 1.062200, 0.631000, 0.000800, 90.0062},
    {610, 1.002600, 0.503000, 0.000340, 89.5991},
    {620, 0.854450, 0.381000, 0.000190, 87.6987},
    {630, 0.642400, 0.265000, 0.000050, 83.2886},
    {640, 0.447900, 0.175000, 0.000020, 83.6992},
    {650, 0.283500, 0.107000, 0.000000, 80.0268},
    {660, 0.164900, 0.061000, 0.000000, 80.2146},
    {670, 0.087400, 0.032000, 0.000000, 82.2778},
    {680, 0.046770, 0.017000, 0.000000, 78.2842},
    {690, 0.022700, 0.008210, 0.000000, 69.7213},
    {700, 0.011359, 0.004102, 0.000000, 71.6091},
    {710, 0.005790, 0.002091, 0.000000, 74.3490},
    {720, 0.002899, 0.001047, 0.000000, 61.6040},
    {730, 0.001440, 0.000520, 0.000000, 69.8856},
    {740, 0.000690, 0.000249, 0.000000, 75.0870},
    {750, 0.000332, 0.000120, 0.000000, 63.5927},
    {760, 0.000166, 0.000060, 0.000000, 46.4182},
    {770, 0.000083, 0.000030, 0.000000, 66.8054},
    {780, 0.000042, 0.000015, 0.000000, 63.3828},
};

ColorMatch build_table() {
  ColorMatch cm;
  cm.wavelengths_nm.resize(kSamples);
  cm.xbar.resize(kSamples);
  cm.ybar.resize(kSamples);
  cm.zbar.resize(kSamples);
  cm.illuminant.resize(kSamples);
  for (int i = 0; i < kSamples; ++i) {
    cm.wavelengths_nm[i] = kTable[i][0];
    cm.xbar[i] = kTable[i][1];
    cm.ybar[i] = kTable[i][2];
    cm.zbar[i] = kTable[i][3];
    cm.illuminant[i] = kTable[i][4];
  }
  return cm;
}

}  // namespace

const ColorMatch& ColorMatch::cie1931_d65() {
  static const ColorMatch cm = build_table();
  return cm;
}

}  // namespace csweep

namespace csweep::detail {

namespace {

struct SrgbMatrices {
  Mat3 to_xyz;
  Mat3 to_rgb;
  std::array<double, 3> white;
};

SrgbMatrices build_matrices() {
  // sRGB primaries and D65 white chromaticities
  const double xr = 0.64, yr = 0.33;
  const double xg = 0.30, yg = 0.60;
  const double xb = 0.15, yb = 0.06;
  const double xw = 0.3127, yw = 0.3290;

  Eigen::Matrix3d prim;
  prim << xr / yr, xg / yg, xb / yb,
          1.0, 1.0, 1.0,
          (1.0 - xr - yr) / yr, (1.0 - xg - yg) / yg, (1.0 - xb - yb) / yb;
  Eigen::Vector3d white(xw / yw, 1.0, (1.0 - xw - yw) / yw);
  Eigen::Vector3d scale = prim.colPivHouseholderQr().solve(white);
  Eigen::Matrix3d m = prim * scale.asDiagonal();
  Eigen::Matrix3d inv = m.inverse();

  SrgbMatrices out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      out.to_xyz[r * 3 + c] = m(r, c);
      out.to_rgb[r * 3 + c] = inv(r, c);
    }
  out.white = {white(0), white(1), white(2)};
  return out;
}

const SrgbMatrices& matrices() {
  static const SrgbMatrices m = build_matrices();
  return m;
}

}  // namespace

const Mat3& rgb_to_xyz() { return matrices().to_xyz; }
const Mat3& xyz_to_rgb() { return matrices().to_rgb; }
const std::array<double, 3>& white_xyz() { return matrices().white; }

std::array<double, 3> apply(const Mat3& m, const std::array<double, 3>& v) {
  return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
          m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
          m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

double srgb_encode(double linear) {
  if (linear <= 0.0031308) return 12.92 * linear;
  return 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

double srgb_decode(double encoded) {
  if (encoded <= 0.04045) return encoded / 12.92;
  return std::pow((encoded + 0.055) / 1.055, 2.4);
}

Lab xyz_to_lab(double x, double y, double z) {
  const auto& w = white_xyz();
  auto f = [](double t) {
    const double delta = 6.0 / 29.0;
    if (t > delta * delta * delta) return std::cbrt(t);
    return t / (3.0 * delta * delta) + 4.0 / 29.0;
  };
  double fx = f(x / w[0]), fy = f(y / w[1]), fz = f(z / w[2]);
  Lab lab;
  lab.l = 116.0 * fy - 16.0;
  lab.a = 500.0 * (fx - fy);
  lab.b = 200.0 * (fy - fz);
  return lab;
}

}  // namespace csweep::detail
