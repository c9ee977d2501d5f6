#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace v2m {

/// Parsed CSV contents: header row plus data rows of raw cell strings.
/// Minimal dialect: comma separated, no quoting, '.' decimal separator,
/// UTF-8, trailing '\r' stripped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv_file(const std::filesystem::path& path);

/// Shortest round-trip decimal representation of a double (std::to_chars),
/// so CSV/JSON re-parse yields the identical value.
std::string format_double(double v);

/// Locale-independent strict double parse; returns false on any trailing junk.
bool parse_double(const std::string& cell, double& out);

void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

/// FNV-1a hash of a file's bytes as a fixed-width hex string (manifests).
std::string file_hash_hex(const std::filesystem::path& path);

}  // namespace v2m
