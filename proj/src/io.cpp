#include "dimred/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "dimred/errors.hpp"

namespace dimred {

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : width_(columns.size()) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) text_ += ',';
    text_ += columns[i];
  }
  text_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  require(values.size() == width_, "csv: row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_double(values[i]);
  }
  text_ += '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
}

namespace {

void put_le32(std::string& out, float v) {
  std::uint32_t u;
  std::memcpy(&u, &v, 4);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap32(u);
  char b[4];
  std::memcpy(b, &u, 4);
  out.append(b, 4);
}

void write_samples(const std::filesystem::path& path, const std::vector<cd>& v,
                   nlohmann::json sidecar) {
  std::string bytes;
  bytes.reserve(v.size() * 8);
  for (const cd& x : v) {
    put_le32(bytes, static_cast<float>(x.real()));
    put_le32(bytes, static_cast<float>(x.imag()));
  }
  write_text(path, bytes);
  sidecar["dtype"] = "complex64";
  sidecar["byte_order"] = "little";
  sidecar["layout"] = "row-major, last index fastest";
  write_text(path.string() + ".json", sidecar.dump(2) + "\n");
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const ComplexField2D& f, double t) {
  const ComplexField2D p = to_physical(f);
  write_samples(path, p.values(),
                {{"t", t}, {"shape", {f.grid().n1(), f.grid().n2()}}, {"axes", {"x1", "x2"}}});
}

void write_snapshot(const std::filesystem::path& path, const ComplexField3D& f, double t) {
  const ComplexField3D p = to_physical(f);
  const auto& g = f.grid();
  write_samples(path, p.values(),
                {{"t", t},
                 {"shape", {g.nz(), g.torus().n1(), g.torus().n2()}},
                 {"axes", {"z", "x1", "x2"}}});
}

}  // namespace dimred
