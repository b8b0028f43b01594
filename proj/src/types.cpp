#include "csweep/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace csweep {

namespace {

bool ascending_strict(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

void check_finite_planes(const std::vector<double>& data, int planes, int height, int width,
                         const char* plane_label, std::vector<std::string>& issues) {
  const std::size_t hw = static_cast<std::size_t>(height) * width;
  for (int p = 0; p < planes; ++p) {
    const double* base = data.data() + static_cast<std::size_t>(p) * hw;
    for (std::size_t q = 0; q < hw; ++q) {
      if (!std::isfinite(base[q])) {
        std::ostringstream os;
        os << "non-finite value at " << plane_label << " " << p << ", pixel ("
           << q / width << ", " << q % width << ")";
        issues.push_back(os.str());
        return;  // first offender is enough to pinpoint the plane
      }
    }
  }
}

}  // namespace

std::string ValidationReport::str() const {
  std::string out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) out += '\n';
    out += issues[i];
  }
  return out;
}

ValidationReport validate(const HyperspectralCube& cube) {
  ValidationReport rep;
  if (cube.height < 1 || cube.width < 1 || cube.channels < 1) {
    rep.issues.push_back("cube dimensions must be positive");
    return rep;
  }
  if (static_cast<int>(cube.wavelengths_nm.size()) != cube.channels)
    rep.issues.push_back("wavelength count does not match channel count");
  else if (!ascending_strict(cube.wavelengths_nm))
    rep.issues.push_back("wavelengths must be strictly increasing");
  if (cube.data.size() != cube.plane_size() * cube.channels) {
    rep.issues.push_back("data length does not match height*width*channels");
    return rep;
  }
  check_finite_planes(cube.data, cube.channels, cube.height, cube.width, "channel", rep.issues);
  return rep;
}

ValidationReport validate(const FocalStack& stack) {
  ValidationReport rep;
  if (stack.height < 1 || stack.width < 1 || stack.count < 1) {
    rep.issues.push_back("stack dimensions must be positive");
    return rep;
  }
  if (static_cast<int>(stack.lens_positions_mm.size()) != stack.count)
    rep.issues.push_back("lens position count does not match measurement count");
  else if (!ascending_strict(stack.lens_positions_mm))
    rep.issues.push_back("lens positions must be strictly increasing");
  if (stack.data.size() != stack.plane_size() * stack.count) {
    rep.issues.push_back("data length does not match height*width*count");
    return rep;
  }
  check_finite_planes(stack.data, stack.count, stack.height, stack.width, "measurement", rep.issues);
  return rep;
}

ValidationReport validate(const PsfStack& psfs) {
  ValidationReport rep;
  if (psfs.count < 1 || psfs.channels < 1) {
    rep.issues.push_back("kernel bank dimensions must be positive");
    return rep;
  }
  if (psfs.kernel_size < 1 || psfs.kernel_size % 2 == 0)
    rep.issues.push_back("kernel size must be odd and positive");
  if (static_cast<int>(psfs.lens_positions_mm.size()) != psfs.count)
    rep.issues.push_back("lens position count does not match count");
  else if (!ascending_strict(psfs.lens_positions_mm))
    rep.issues.push_back("lens positions must be strictly increasing");
  if (static_cast<int>(psfs.wavelengths_nm.size()) != psfs.channels)
    rep.issues.push_back("wavelength count does not match channels");
  else if (!ascending_strict(psfs.wavelengths_nm))
    rep.issues.push_back("wavelengths must be strictly increasing");
  if (psfs.kernels.size() !=
      psfs.kernel_area() * static_cast<std::size_t>(psfs.count) * psfs.channels) {
    rep.issues.push_back("kernel data length does not match count*channels*kernel_size^2");
    return rep;
  }
  for (int i = 0; i < psfs.count; ++i) {
    for (int j = 0; j < psfs.channels; ++j) {
      const double* k = psfs.kernel(i, j);
      double sum = 0.0;
      bool neg = false, finite = true;
      for (std::size_t q = 0; q < psfs.kernel_area(); ++q) {
        if (!std::isfinite(k[q])) finite = false;
        if (k[q] < 0.0) neg = true;
        sum += k[q];
      }
      std::ostringstream tag;
      tag << "kernel (i=" << i << ", j=" << j << ")";
      if (!finite) {
        rep.issues.push_back(tag.str() + " has non-finite entries");
        continue;
      }
      if (neg) rep.issues.push_back(tag.str() + " has negative entries");
      // tolerance covers the f32 payload of serialized banks; construction
      // normalizes far tighter than this
      if (std::abs(sum - 1.0) > 1e-6) {
        std::ostringstream os;
        os.precision(17);
        os << tag.str() << " sums to " << sum << ", expected 1";
        rep.issues.push_back(os.str());
      }
    }
  }
  return rep;
}

ValidationReport validate(const SpectralBasis& basis) {
  ValidationReport rep;
  if (basis.dim < 1 || basis.channels < 1) {
    rep.issues.push_back("basis dimensions must be positive");
    return rep;
  }
  if (basis.dim > basis.channels)
    rep.issues.push_back("basis dim exceeds channel count");
  if (basis.rows.size() != static_cast<std::size_t>(basis.dim) * basis.channels) {
    rep.issues.push_back("row data length does not match dim*channels");
    return rep;
  }
  for (double x : basis.rows) {
    if (!std::isfinite(x)) {
      rep.issues.push_back("basis has non-finite entries");
      return rep;
    }
  }
  // B B^T must be the identity
  double worst = 0.0;
  for (int k = 0; k < basis.dim; ++k) {
    for (int l = k; l < basis.dim; ++l) {
      double s = 0.0;
      for (int j = 0; j < basis.channels; ++j) s += basis.at(k, j) * basis.at(l, j);
      double target = (k == l) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(s - target));
    }
  }
  if (worst >= 1e-10) {
    std::ostringstream os;
    os << "rows are not orthonormal (max deviation " << worst << ")";
    rep.issues.push_back(os.str());
  }
  return rep;
}

ValidationReport validate(const SpectralResponse& resp) {
  ValidationReport rep;
  if (resp.wavelengths_nm.empty()) {
    rep.issues.push_back("response table is empty");
    return rep;
  }
  if (resp.wavelengths_nm.size() != resp.response.size())
    rep.issues.push_back("wavelength and response lengths differ");
  if (!ascending_strict(resp.wavelengths_nm))
    rep.issues.push_back("response wavelengths must be strictly increasing");
  for (double r : resp.response) {
    if (!(r >= 0.0 && r <= 1.0) || !std::isfinite(r)) {
      rep.issues.push_back("response values must lie in [0, 1]");
      break;
    }
  }
  return rep;
}

void require_valid(const ValidationReport& report, const char* what) {
  if (!report.ok()) throw std::invalid_argument(std::string(what) + ": " + report.str());
}

std::vector<double> resample_response(const SpectralResponse& resp,
                                      const std::vector<double>& wavelengths_nm) {
  require_valid(validate(resp), "resample_response");
  std::vector<double> out;
  out.reserve(wavelengths_nm.size());
  const auto& xs = resp.wavelengths_nm;
  for (double w : wavelengths_nm) {
    if (w < xs.front() || w > xs.back()) {
      std::ostringstream os;
      os << "resample_response: wavelength " << w << " nm outside tabulated range ["
         << xs.front() << ", " << xs.back() << "]";
      throw std::invalid_argument(os.str());
    }
    auto it = std::lower_bound(xs.begin(), xs.end(), w);
    if (it == xs.begin()) {
      out.push_back(resp.response.front());
      continue;
    }
    std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    std::size_t lo = hi - 1;
    if (hi == xs.size()) {
      out.push_back(resp.response.back());
      continue;
    }
    double t = (w - xs[lo]) / (xs[hi] - xs[lo]);
    out.push_back(resp.response[lo] + t * (resp.response[hi] - resp.response[lo]));
  }
  return out;
}

}  // namespace csweep
