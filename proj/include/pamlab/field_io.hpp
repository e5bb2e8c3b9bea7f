#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pamlab/field.hpp"

namespace pamlab {

/// Binary field file, little-endian:
///   "PAMF" | u32 version (1) | u32 dim | u32 n | f64 radius |
///   u32 metadata length | metadata (UTF-8 JSON) | n^d f64 values (row-major)
void write_field(std::ostream& os, const Field& f, const std::string& metadata = "{}");
void write_field(const std::filesystem::path& path, const Field& f, const std::string& metadata = "{}");

struct FieldFile {
  Field field;
  std::string metadata;
};

/// Throws FormatError on a malformed or truncated file.
FieldFile read_field(std::istream& is);
FieldFile read_field(const std::filesystem::path& path);

/// CSV with columns x0..x{d-1},value.
void write_field_csv(std::ostream& os, const Field& f);

} // namespace pamlab
