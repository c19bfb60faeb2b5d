#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "nlslab/error.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

namespace {

template <class T>
void put(std::ostream& os, T v) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

template <class T>
T get(std::istream& is) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw SpecError("truncated field file");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  T v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_field(const std::string& path, const FieldState& state) {
  state.check_shape();
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw SpecError("cannot write field file '" + path + "'");
    put<std::uint64_t>(os, static_cast<std::uint64_t>(state.grid.dim));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(state.grid.points));
    put<double>(os, state.grid.half_length);
    put<std::uint64_t>(os, static_cast<std::uint64_t>(state.count()));
    put<double>(os, state.t);
    for (const auto& c : state.components) {
      for (const auto& v : c) {
        put<double>(os, v.real());
        put<double>(os, v.imag());
      }
    }
    if (!os) throw SpecError("failed writing field file '" + path + "'");
  }
  std::filesystem::rename(tmp, path);
}

FieldState read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SpecError("cannot open field file '" + path + "'");
  GridSpec grid;
  const auto n = get<std::uint64_t>(is);
  const auto N = get<std::uint64_t>(is);
  grid.half_length = get<double>(is);
  const auto l = get<std::uint64_t>(is);
  const double t = get<double>(is);
  if (n < 1 || n > 3 || N > (1u << 20) || l < 1 || l > 64) throw SpecError("corrupt field file header");
  grid.dim = static_cast<int>(n);
  grid.points = static_cast<int>(N);
  grid.validate();
  FieldState state(grid, static_cast<int>(l), t);
  for (auto& c : state.components) {
    for (auto& v : c) {
      const double re = get<double>(is);
      const double im = get<double>(is);
      v = cplx(re, im);
    }
  }
  return state;
}

}  // namespace nlslab
