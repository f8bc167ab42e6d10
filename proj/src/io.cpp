#include "specpart/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <ostream>

#include <openssl/sha.h>

#include "specpart/errors.hpp"

namespace specpart::io {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in[at + b]) << (8 * b);
  return v;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, mode | std::ios::trunc);
  if (!os) throw ValidationError("cannot write " + path.string());
  return os;
}

}  // namespace

std::vector<std::uint8_t> encode_field(const Field& f) {
  const GridSpec& g = f.grid();
  std::vector<std::uint8_t> out;
  out.reserve(16 + 8 * g.size());
  out.insert(out.end(), {'S', 'P', 'F', 'D'});
  put_u32(out, static_cast<std::uint32_t>(g.dim()));
  put_u32(out, static_cast<std::uint32_t>(g.count()[0]));
  put_u32(out, static_cast<std::uint32_t>(g.count()[1]));
  for (const double v : f.values()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
  }
  return out;
}

FieldDump decode_field(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), "SPFD", 4) != 0) {
    throw ValidationError("not a field dump");
  }
  FieldDump d;
  d.dim = get_u32(bytes, 4);
  d.count = {get_u32(bytes, 8), get_u32(bytes, 12)};
  const std::size_t n = static_cast<std::size_t>(d.count[0]) * d.count[1];
  if (bytes.size() != 16 + 8 * n) throw ValidationError("field dump has the wrong length");
  d.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[16 + 8 * i + b]) << (8 * b);
    d.values[i] = std::bit_cast<double>(bits);
  }
  return d;
}

void write_field(const fs::path& path, const Field& f) { write_bytes(path, encode_field(f)); }

FieldDump read_field(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot read " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_field(bytes);
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_eigen_csv(std::ostream& os, std::span<const Eigenpair> pairs) {
  os << "index,lambda,residual\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    os << i + 1 << ',' << format_double(pairs[i].lambda) << ',' << format_double(pairs[i].residual) << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const PerssonSweep& sweep) {
  os << "r,lambda,monotone_ok\n";
  for (const auto& e : sweep.entries) {
    os << format_double(e.r) << ',' << format_double(e.lambda) << ',' << (e.monotone_ok ? "true" : "false") << '\n';
  }
}

void write_annulus_csv(std::ostream& os, const PerssonSweep& sweep) {
  os << "r,R,lambda,monotone_ok\n";
  for (const auto& e : sweep.annulus) {
    os << format_double(e.r) << ',' << format_double(e.R) << ',' << format_double(e.lambda) << ','
       << (e.monotone_ok ? "true" : "false") << '\n';
  }
}

void write_pgm(std::ostream& os, const GridSpec& g, std::span<const DomainMask> cells) {
  if (cells.size() > 255) throw ValidationError("PGM export supports at most 255 cells");
  const int w = g.count()[0], h = g.count()[1];
  std::vector<std::uint8_t> label(g.size(), 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].grid() != g) throw GridMismatch("cell grid differs from the export grid");
    for (const auto idx : cells[i].points()) label[idx] = static_cast<std::uint8_t>(i + 1);
  }
  os << "P5\n" << w << ' ' << h << "\n" << std::max<std::size_t>(cells.size(), 1) << "\n";
  for (int row = h - 1; row >= 0; --row) {
    for (int col = 0; col < w; ++col) os.put(static_cast<char>(label[g.index(col, row)]));
  }
}

std::string content_hash(std::string_view content) {
  std::string blob = "blob " + std::to_string(content.size());
  blob.push_back('\0');
  blob.append(content);
  unsigned char md[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), md);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (const unsigned char c : md) {
    out.push_back(hex[c >> 4]);
    out.push_back(hex[c & 15]);
  }
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void write_text(const fs::path& path, const std::string& text) {
  auto os = open_out(path, std::ios::binary);
  os << text;
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  auto os = open_out(path, std::ios::binary);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace specpart::io
