#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "eigdef/edm.hpp"
#include "eigdef/modal.hpp"

// On-disk layout. A directory holds manifest.json plus raw arrays:
// little-endian float64, column-major, complex as interleaved (re, im)
// pairs. The mass matrix lives in E.coo as zero-based "row col value" lines.
// Every array carries its shape, dtype and CRC-32 in the manifest.
namespace eigdef::io {

inline constexpr int kFormatVersion = 1;

void save_database(const modal::ModeDatabase& db, const std::filesystem::path& dir);
modal::ModeDatabase load_database(const std::filesystem::path& dir);

void save_edm_bases(const std::vector<edm::EdmBasis>& bases, const std::filesystem::path& dir);
std::vector<edm::EdmBasis> load_edm_bases(const std::filesystem::path& dir);

/// Writes `contents` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

/// CSV with a header row; numbers are printed round-trip exact.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> cells);
  std::string str() const;
  void save(const std::filesystem::path& path) const { write_file_atomic(path, str()); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_number(double v);

/// CRC-32 of a byte buffer, as 8 lowercase hex digits.
std::string crc32_hex(const std::string& bytes);

}  // namespace eigdef::io
