#include "pamlab/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "pamlab/errors.hpp"

namespace pamlab {

static_assert(std::endian::native == std::endian::little, "field files assume a little-endian host");

namespace {

constexpr char kMagic[4] = {'P', 'A', 'M', 'F'};
constexpr std::uint32_t kFormatVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is, const char* what) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError(std::string("truncated field file: ") + what);
  return v;
}

} // namespace

void write_field(std::ostream& os, const Field& f, const std::string& metadata) {
  const Grid& g = f.grid();
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kFormatVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n));
  put<double>(os, g.radius);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(metadata.size()));
  os.write(metadata.data(), static_cast<std::streamsize>(metadata.size()));
  os.write(reinterpret_cast<const char*>(f.data().data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
  if (!os) throw Error("failed writing field");
}

void write_field(const std::filesystem::path& path, const Field& f, const std::string& metadata) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  write_field(os, f, metadata);
}

FieldFile read_field(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw FormatError("not a field file (bad magic)");
  const auto version = get<std::uint32_t>(is, "version");
  if (version != kFormatVersion) throw FormatError("unsupported field file version " + std::to_string(version));
  const auto dim = get<std::uint32_t>(is, "dim");
  const auto n = get<std::uint32_t>(is, "n");
  const auto radius = get<double>(is, "radius");
  if (dim < 1 || dim > 8 || n < 1 || !(radius > 0.0)) throw FormatError("invalid grid in field file header");
  const auto meta_len = get<std::uint32_t>(is, "metadata length");
  if (meta_len > (1u << 24)) throw FormatError("metadata too long");
  std::string meta(meta_len, '\0');
  if (!is.read(meta.data(), meta_len)) throw FormatError("truncated field file: metadata");
  const Grid g(static_cast<int>(dim), radius, static_cast<int>(n));
  if (g.size() > (std::size_t{1} << 32)) throw FormatError("field too large");
  std::vector<double> values(g.size());
  if (!is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double))))
    throw FormatError("truncated field file: values");
  return {Field(g, std::move(values)), std::move(meta)};
}

FieldFile read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open '" + path.string() + "'");
  return read_field(is);
}

void write_field_csv(std::ostream& os, const Field& f) {
  const Grid& g = f.grid();
  for (int a = 0; a < g.dim; ++a) os << 'x' << a << ',';
  os << "value\n";
  os.precision(17);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const Point p = g.point(k);
    for (double c : p) os << c << ',';
    os << f[k] << '\n';
  }
}

} // namespace pamlab
