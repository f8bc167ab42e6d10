#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "specpart/eigensolver.hpp"
#include "specpart/spectrum.hpp"

namespace specpart::io {

namespace fs = std::filesystem;

// Binary field dump: "SPFD", u32 dimension, u32 count0, u32 count1 (all
// little-endian), then count0*count1 little-endian float64 values in grid
// order over the whole window, exterior points written as 0.0.
struct FieldDump {
  std::uint32_t dim = 0;
  std::array<std::uint32_t, 2> count{0, 0};
  std::vector<double> values;
};

std::vector<std::uint8_t> encode_field(const Field& f);
FieldDump decode_field(std::span<const std::uint8_t> bytes);
void write_field(const fs::path& path, const Field& f);
FieldDump read_field(const fs::path& path);

/// index,lambda,residual with 1-based index.
void write_eigen_csv(std::ostream& os, std::span<const Eigenpair> pairs);
/// r,lambda,monotone_ok for the ball sweep.
void write_sweep_csv(std::ostream& os, const PerssonSweep& sweep);
/// r,R,lambda,monotone_ok for the annulus sweep.
void write_annulus_csv(std::ostream& os, const PerssonSweep& sweep);

/// Binary greymap (P5) of cell labels: 0 outside every cell, i for cell i.
/// Image rows run from the top of the window (largest second coordinate).
void write_pgm(std::ostream& os, const GridSpec& g, std::span<const DomainMask> cells);

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

/// Git blob hash (SHA-1 over "blob <size>\0" + content), lowercase hex.
std::string content_hash(std::string_view content);

/// Pretty-printed JSON with a trailing newline.
void write_json(const fs::path& path, const nlohmann::json& j);
void write_text(const fs::path& path, const std::string& text);
void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes);

}  // namespace specpart::io
