#include "eulerforge/efld.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace ef {

static_assert(std::endian::native == std::endian::little, "EFLD writer assumes a little-endian host");

namespace {

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::ios_base::failure("efld: truncated header");
  return v;
}

constexpr std::size_t kHeaderBytes = 4 + 4 + 1 + 1 + 2 + 12 + 8;

EfldInfo parse_header(std::ifstream& is, const std::string& path) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "EFLD", 4) != 0) throw std::ios_base::failure("efld: bad magic in " + path);
  EfldInfo info;
  const auto version = get<std::uint32_t>(is);
  if (version != 1) throw std::ios_base::failure("efld: unsupported version");
  info.rank = get<std::uint8_t>(is);
  info.symmetric = get<std::uint8_t>(is) != 0;
  info.ncomp = get<std::uint16_t>(is);
  for (int a = 0; a < 3; ++a) info.dims[a] = int(get<std::uint32_t>(is));
  info.time = get<double>(is);
  const std::size_t npts = std::size_t(info.dims[0]) * info.dims[1] * info.dims[2];
  const auto bytes = std::filesystem::file_size(path) - kHeaderBytes;
  if (bytes == npts * info.ncomp * 8)
    info.complex_payload = false;
  else if (bytes == npts * info.ncomp * 16)
    info.complex_payload = true;
  else
    throw std::ios_base::failure("efld: payload size does not match header");
  return info;
}

}  // namespace

void write_efld(const std::string& path, const Field& f, bool complex_payload) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::ios_base::failure("efld: cannot open " + path);
  os.write("EFLD", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint8_t>(os, std::uint8_t(f.rank()));
  put<std::uint8_t>(os, f.symmetric() ? 1 : 0);
  put<std::uint16_t>(os, std::uint16_t(f.ncomp()));
  for (int a = 0; a < 3; ++a) put<std::uint32_t>(os, std::uint32_t(f.grid().n));
  put<double>(os, f.time);
  for (int c = 0; c < f.ncomp(); ++c)
    for (const auto& x : f[c]) {
      put<double>(os, x.real());
      if (complex_payload) put<double>(os, x.imag());
    }
}

EfldInfo read_efld_info(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::ios_base::failure("efld: cannot open " + path);
  return parse_header(is, path);
}

Field read_efld(const std::string& path, EfldInfo* out_info) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::ios_base::failure("efld: cannot open " + path);
  EfldInfo info = parse_header(is, path);
  require(info.dims[0] == info.dims[1] && info.dims[1] == info.dims[2], "efld: only cubic grids supported");
  GridSpec g;
  g.n = info.dims[0];
  Field f(g, info.rank, info.symmetric, info.time);
  require(f.ncomp() == info.ncomp, "efld: component count inconsistent with rank");
  for (int c = 0; c < f.ncomp(); ++c)
    for (auto& x : f[c]) {
      const double re = get<double>(is);
      const double im = info.complex_payload ? get<double>(is) : 0.0;
      x = cplx(re, im);
    }
  if (out_info) *out_info = info;
  return f;
}

}  // namespace ef
