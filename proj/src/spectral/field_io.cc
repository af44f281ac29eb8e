// SPDX-License-Identifier: Apache-2.0
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "cgoinv/errors.h"
#include "cgoinv/spectral.h"

namespace cgoinv {
namespace {

constexpr std::array<char, 4> kMagic{'C', 'G', 'O', '1'};

static_assert(std::endian::native == std::endian::little,
              "CGO1 I/O assumes a little-endian host");

void WriteU32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t ReadU32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw FormatError("CGO1: truncated header");
  return v;
}

}  // namespace

void WriteField(std::ostream& out, const Field& f) {
  out.write(kMagic.data(), kMagic.size());
  WriteU32(out, static_cast<std::uint32_t>(f.grid.dim()));
  WriteU32(out, static_cast<std::uint32_t>(f.grid.n()));
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(Complex)));
  if (!out) throw FormatError("CGO1: write failed");
}

Field ReadField(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw FormatError("CGO1: bad magic");
  const std::uint32_t d = ReadU32(in);
  const std::uint32_t n = ReadU32(in);
  if (d < 3 || d > 8 || n < 8 || n > 4096) {
    throw FormatError("CGO1: implausible grid header");
  }
  Field f(TorusGrid(static_cast<int>(d), static_cast<int>(n)));
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(Complex)));
  if (!in) throw FormatError("CGO1: truncated sample block");
  return f;
}

void WriteFieldFile(const std::string& path, const Field& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  WriteField(out, f);
}

Field ReadFieldFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return ReadField(in);
}

}  // namespace cgoinv
