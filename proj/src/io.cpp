#include "csweep/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace csweep {

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");

namespace {

constexpr std::uint32_t kMaxDim = 1u << 24;  // sanity bound on header fields

class Reader {
 public:
  Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open '" + path + "' for reading");
  }

  void read_exact(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      std::ostringstream os;
      os << "truncated file '" << path_ << "': needed " << n << " bytes at offset " << offset_;
      throw IoError(os.str());
    }
    offset_ += n;
  }

  std::uint32_t read_u32() {
    std::uint32_t v;
    read_exact(&v, sizeof v);
    return v;
  }

  std::vector<double> read_f64(std::size_t n) {
    std::vector<double> v(n);
    read_exact(v.data(), n * sizeof(double));
    return v;
  }

  std::vector<double> read_f32_as_f64(std::size_t n) {
    std::vector<float> tmp(n);
    read_exact(tmp.data(), n * sizeof(float));
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = tmp[i];
    return v;
  }

  void expect_magic(const char* magic) {
    char got[4];
    read_exact(got, 4);
    if (std::memcmp(got, magic, 4) != 0) {
      std::ostringstream os;
      os << "bad magic in '" << path_ << "': expected " << magic;
      throw IoError(os.str());
    }
  }

  std::uint32_t read_dim(const char* name) {
    std::uint32_t v = read_u32();
    if (v < 1 || v > kMaxDim) {
      std::ostringstream os;
      os << "invalid " << name << " " << v << " in '" << path_ << "'";
      throw IoError(os.str());
    }
    return v;
  }

  Metadata read_metadata() {
    std::uint32_t len = read_u32();
    std::string block(len, '\0');
    if (len) read_exact(block.data(), len);
    Metadata md;
    std::size_t pos = 0;
    while (pos < block.size()) {
      std::size_t nl = block.find('\n', pos);
      if (nl == std::string::npos) nl = block.size();
      std::string line = block.substr(pos, nl - pos);
      pos = nl + 1;
      if (line.empty()) continue;
      std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw IoError("malformed metadata line in '" + path_ + "': " + line);
      md.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return md;
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t offset_ = 0;
};

class Writer {
 public:
  Writer(const std::string& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open '" + path + "' for writing");
  }

  void write_exact(const void* src, std::size_t n) {
    out_.write(static_cast<const char*>(src), static_cast<std::streamsize>(n));
  }

  void write_u32(std::uint32_t v) { write_exact(&v, sizeof v); }
  void write_f64(const std::vector<double>& v) { write_exact(v.data(), v.size() * sizeof(double)); }

  void write_f64_as_f32(const std::vector<double>& v) {
    std::vector<float> tmp(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) tmp[i] = static_cast<float>(v[i]);
    write_exact(tmp.data(), tmp.size() * sizeof(float));
  }

  void write_metadata(const Metadata& md) {
    std::string block;
    for (const auto& [key, value] : md) {
      if (key.empty() || key.find('=') != std::string::npos ||
          key.find('\n') != std::string::npos || value.find('\n') != std::string::npos)
        throw IoError("metadata keys must be non-empty without '=' or newlines; values without newlines");
      block += key;
      block += '=';
      block += value;
      block += '\n';
    }
    write_u32(static_cast<std::uint32_t>(block.size()));
    write_exact(block.data(), block.size());
  }

  void close() {
    out_.flush();
    if (!out_) throw IoError("write to '" + path_ + "' failed");
    out_.close();
  }

 private:
  std::string path_;
  std::ofstream out_;
};

}  // namespace

void write_cube(const std::string& path, const HyperspectralCube& cube, const Metadata& md) {
  Writer w(path);
  w.write_exact("HSC1", 4);
  w.write_u32(static_cast<std::uint32_t>(cube.height));
  w.write_u32(static_cast<std::uint32_t>(cube.width));
  w.write_u32(static_cast<std::uint32_t>(cube.channels));
  w.write_metadata(md);
  w.write_f64(cube.wavelengths_nm);
  w.write_f64_as_f32(cube.data);
  w.close();
}

HyperspectralCube read_cube(const std::string& path, Metadata* metadata) {
  Reader r(path);
  r.expect_magic("HSC1");
  HyperspectralCube cube;
  cube.height = static_cast<int>(r.read_dim("height"));
  cube.width = static_cast<int>(r.read_dim("width"));
  cube.channels = static_cast<int>(r.read_dim("channels"));
  Metadata md = r.read_metadata();
  cube.wavelengths_nm = r.read_f64(cube.channels);
  cube.data = r.read_f32_as_f64(cube.plane_size() * cube.channels);
  if (metadata) *metadata = std::move(md);
  return cube;
}

void write_stack(const std::string& path, const FocalStack& stack, const Metadata& md) {
  Writer w(path);
  w.write_exact("FST1", 4);
  w.write_u32(static_cast<std::uint32_t>(stack.height));
  w.write_u32(static_cast<std::uint32_t>(stack.width));
  w.write_u32(static_cast<std::uint32_t>(stack.count));
  w.write_metadata(md);
  w.write_f64(stack.lens_positions_mm);
  w.write_f64_as_f32(stack.data);
  w.close();
}

FocalStack read_stack(const std::string& path, Metadata* metadata) {
  Reader r(path);
  r.expect_magic("FST1");
  FocalStack stack;
  stack.height = static_cast<int>(r.read_dim("height"));
  stack.width = static_cast<int>(r.read_dim("width"));
  stack.count = static_cast<int>(r.read_dim("count"));
  Metadata md = r.read_metadata();
  stack.lens_positions_mm = r.read_f64(stack.count);
  stack.data = r.read_f32_as_f64(stack.plane_size() * stack.count);
  if (metadata) *metadata = std::move(md);
  return stack;
}

void write_psfs(const std::string& path, const PsfStack& psfs) {
  Writer w(path);
  w.write_exact("PSF1", 4);
  w.write_u32(static_cast<std::uint32_t>(psfs.count));
  w.write_u32(static_cast<std::uint32_t>(psfs.channels));
  w.write_u32(static_cast<std::uint32_t>(psfs.kernel_size));
  w.write_f64(psfs.lens_positions_mm);
  w.write_f64(psfs.wavelengths_nm);
  w.write_f64_as_f32(psfs.kernels);
  w.close();
}

PsfStack read_psfs(const std::string& path) {
  Reader r(path);
  r.expect_magic("PSF1");
  PsfStack psfs;
  psfs.count = static_cast<int>(r.read_dim("count"));
  psfs.channels = static_cast<int>(r.read_dim("channels"));
  psfs.kernel_size = static_cast<int>(r.read_dim("kernel_size"));
  psfs.lens_positions_mm = r.read_f64(psfs.count);
  psfs.wavelengths_nm = r.read_f64(psfs.channels);
  psfs.kernels =
      r.read_f32_as_f64(psfs.kernel_area() * static_cast<std::size_t>(psfs.count) * psfs.channels);
  return psfs;
}

void write_ppm(const std::string& path, const RgbImage& img) {
  if (img.height < 1 || img.width < 1 ||
      img.data.size() != 3 * img.plane_size())
    throw IoError("write_ppm: malformed image");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(img.width) * 3);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      for (int p = 0; p < 3; ++p) {
        double v = img.plane(p)[static_cast<std::size_t>(r) * img.width + c];
        v = std::clamp(v, 0.0, 1.0);
        row[static_cast<std::size_t>(c) * 3 + p] =
            static_cast<unsigned char>(std::lround(v * 255.0));
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace csweep
