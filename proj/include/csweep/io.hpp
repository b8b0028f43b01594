#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csweep/types.hpp"

namespace csweep {

// Ordered key=value pairs carried in cube and stack headers. Keys must not
// contain '=' or newlines; values must not contain newlines.
using Metadata = std::vector<std::pair<std::string, std::string>>;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Little-endian containers. Pixel payloads are stored as float32 in the order
// the in-memory containers use; headers carry dimensions and axis tables as
// written, so write/read/write round-trips are byte-identical.
void write_cube(const std::string& path, const HyperspectralCube&, const Metadata& = {});
HyperspectralCube read_cube(const std::string& path, Metadata* metadata = nullptr);

void write_stack(const std::string& path, const FocalStack&, const Metadata& = {});
FocalStack read_stack(const std::string& path, Metadata* metadata = nullptr);

void write_psfs(const std::string& path, const PsfStack&);
PsfStack read_psfs(const std::string& path);

// 8-bit binary PPM (P6). Values are clamped to [0, 1] then scaled to 0..255.
void write_ppm(const std::string& path, const RgbImage&);

}  // namespace csweep
