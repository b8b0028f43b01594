#pragma once

#include <array>

#include "csweep/metrics.hpp"

// Internal sRGB machinery shared by the color table and the metrics. The
// linear matrices are derived from the sRGB primaries and D65 white point at
// startup, so matrix * white == (1,1,1) holds to machine precision.

namespace csweep::detail {

using Mat3 = std::array<double, 9>;  // row-major

const Mat3& rgb_to_xyz();
const Mat3& xyz_to_rgb();
const std::array<double, 3>& white_xyz();

std::array<double, 3> apply(const Mat3& m, const std::array<double, 3>& v);

double srgb_encode(double linear);
double srgb_decode(double encoded);

Lab xyz_to_lab(double x, double y, double z);

}  // namespace csweep::detail
