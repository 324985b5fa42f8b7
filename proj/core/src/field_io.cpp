#include "lanslab/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lanslab/spectral.hpp"

namespace lanslab {
namespace {

constexpr char kMagic[8] = {'L', 'A', 'N', 'S', 'F', 'L', 'D', '1'};
constexpr std::uint32_t kVersion = 1;

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <class T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("read_field: truncated container");
  return to_little(v);
}

}  // namespace

FieldHeader read_field_header(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("read_field: bad magic, not a field container");
  if (get<std::uint32_t>(is) != kVersion) throw std::runtime_error("read_field: unsupported version");
  FieldHeader h;
  const auto rank = get<std::uint32_t>(is);
  if (rank > 2) throw std::runtime_error("read_field: bad rank");
  h.rank = static_cast<Rank>(rank);
  h.dim = static_cast<int>(get<std::uint32_t>(is));
  h.points_per_axis = static_cast<int>(get<std::uint32_t>(is));
  h.components = static_cast<int>(get<std::uint32_t>(is));
  h.real_valued = get<std::uint32_t>(is) != 0;
  h.box_length = get<double>(is);
  h.dealias_fraction = get<double>(is);
  h.time = get<double>(is);
  return h;
}

template <Rank R>
void write_field(std::ostream& os, const SpectralField<R>& f, double time) {
  const auto& g = f.grid();
  os.write(kMagic, 8);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(R));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.points_per_axis()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.components()));
  put<std::uint32_t>(os, f.real_valued() ? 1u : 0u);
  put<double>(os, g.box_length());
  put<double>(os, g.dealias_fraction());
  put<double>(os, time);
  for (const auto& comp : f)
    for (const auto& z : comp) {
      put<double>(os, z.real());
      put<double>(os, z.imag());
    }
  if (!os) throw std::runtime_error("write_field: stream error");
}

template <Rank R>
SpectralField<R> read_field(std::istream& is, FieldHeader* header) {
  const FieldHeader h = read_field_header(is);
  if (h.rank != R) throw ShapeMismatch("read_field: container rank does not match requested field type");
  TorusGrid grid(h.dim, h.points_per_axis, h.box_length, h.dealias_fraction);
  SpectralField<R> f(grid, h.real_valued);
  if (static_cast<std::size_t>(h.components) != f.components())
    throw ShapeMismatch("read_field: component count does not match rank and dimension");
  for (auto& comp : f)
    for (auto& z : comp) {
      const double re = get<double>(is);
      const double im = get<double>(is);
      z = Complex(re, im);
    }
  if (header) *header = h;
  return f;
}

template <Rank R>
void save_field(const std::filesystem::path& path, const SpectralField<R>& f, double time) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_field: cannot open " + path.string());
  write_field(os, f, time);
}

template <Rank R>
SpectralField<R> load_field(const std::filesystem::path& path, FieldHeader* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_field: cannot open " + path.string());
  return read_field<R>(is, header);
}

template <Rank R>
void write_samples_csv(std::ostream& os, const SpectralField<R>& f, const std::string& preamble) {
  if (!preamble.empty()) {
    std::istringstream lines(preamble);
    for (std::string line; std::getline(lines, line);) os << "# " << line << '\n';
  }
  const auto samples = inverse_transform(f);
  const int dim = f.dim();
  const bool complex_out = !f.real_valued();
  for (int d = 0; d < dim; ++d) os << (d ? "," : "") << 'x' << d;
  for (std::size_t c = 0; c < f.components(); ++c) {
    os << ",c" << c;
    if (complex_out) os << ",c" << c << "_im";
  }
  os << '\n';
  os << std::setprecision(17);
  for_each_point(f.grid(), [&](std::size_t idx, const std::array<double, 3>& x) {
    for (int d = 0; d < dim; ++d) os << (d ? "," : "") << x[d];
    for (std::size_t c = 0; c < f.components(); ++c) {
      os << ',' << samples[c][idx].real();
      if (complex_out) os << ',' << samples[c][idx].imag();
    }
    os << '\n';
  });
}

#define LANSLAB_INSTANTIATE(R)                                                                  \
  template void write_field<R>(std::ostream&, const SpectralField<R>&, double);                 \
  template SpectralField<R> read_field<R>(std::istream&, FieldHeader*);                         \
  template void save_field<R>(const std::filesystem::path&, const SpectralField<R>&, double);   \
  template SpectralField<R> load_field<R>(const std::filesystem::path&, FieldHeader*);          \
  template void write_samples_csv<R>(std::ostream&, const SpectralField<R>&, const std::string&);

LANSLAB_INSTANTIATE(Rank::scalar)
LANSLAB_INSTANTIATE(Rank::vector)
LANSLAB_INSTANTIATE(Rank::tensor)

#undef LANSLAB_INSTANTIATE

}  // namespace lanslab
