#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ireg/grid.hpp"
#include "ireg/tomo.hpp"

namespace ireg::io {

// IGRD: "IGRD", u8 version=1, u32 nx, u32 ny, f64 x_min, x_max, y_min, y_max,
//       nx*ny f64 values row-major; all little-endian.
void write_igrd(const std::filesystem::path &path, const ScalarImage &img);
ScalarImage read_igrd(const std::filesystem::path &path);

// ISIN: "ISIN", u8 version=1, u32 M, u32 P, f64 s_min, s_max, M*P f64 values angle-major.
// The ray quadrature is not stored; it is rebuilt from the detector extent.
void write_isin(const std::filesystem::path &path, const Sinogram &sino);
Sinogram read_isin(const std::filesystem::path &path);

/// Rebuilds the sinogram's ray quadrature for reconstruction on grid. Throws
/// ConfigError if the stored detector extent does not belong to that grid.
Sinogram attach_grid(const Sinogram &sino, const Grid2D &grid);

/// In-memory encoders used by the writers (and by tests for bit-exact checks).
std::vector<unsigned char> encode_igrd(const ScalarImage &img);
ScalarImage decode_igrd(const std::vector<unsigned char> &bytes);
std::vector<unsigned char> encode_isin(const Sinogram &sino);
Sinogram decode_isin(const std::vector<unsigned char> &bytes);

/// 16-bit binary PGM preview; values clamped to [lo, hi] and mapped to 0..65535.
/// Row 0 of the file is the top of the image (largest y).
void write_pgm16(const std::filesystem::path &path, const ScalarImage &img, double lo = 0.0, double hi = 1.0);

/// RFC-4180 field quoting.
std::string csv_field(const std::string &s);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

} // namespace ireg::io
