// Output helpers: locale-independent number formatting, CSV and raw field
// snapshots with JSON sidecars.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dimred/spectral.hpp"

namespace dimred {

/// Shortest-exact decimal with 17 significant digits, '.' separator.
std::string format_double(double x);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void row(const std::vector<double>& values);
  const std::string& str() const { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

void write_text(const std::filesystem::path& path, const std::string& text);

/// Physical samples as little-endian complex64 pairs plus `<path>.json`
/// describing the shape and layout.
void write_snapshot(const std::filesystem::path& path, const ComplexField2D& f, double t);
void write_snapshot(const std::filesystem::path& path, const ComplexField3D& f, double t);

}  // namespace dimred
