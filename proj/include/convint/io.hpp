#pragma once

#include "convint/core.hpp"
#include "convint/spectral.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace convint::io {

class FormatError : public Error {
 public:
  using Error::Error;
};

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);
double parse_double(std::string_view text);

/// CSV with header `x,y`, one point per line.
void write_pattern(std::ostream& out, const PointPattern& pattern);
void write_pattern(const std::filesystem::path& path, const PointPattern& pattern);
PointPattern read_pattern(std::istream& in, const Window& window);
PointPattern read_pattern(const std::filesystem::path& path, const Window& window);

/// Text grid: `nx ny width height`, then ny lines of nx values (y increasing).
void write_grid(std::ostream& out, const Grid& grid);
void write_grid(const std::filesystem::path& path, const Grid& grid);
Grid read_grid(std::istream& in);
Grid read_grid(const std::filesystem::path& path);

/// CSV `kx,ky,re,im`: a `0,0,re,0` row followed by canonical frequencies.
void write_spectrum(std::ostream& out, const Spectrum& spectrum);
void write_spectrum(const std::filesystem::path& path, const Spectrum& spectrum);
Spectrum read_spectrum(std::istream& in);
Spectrum read_spectrum(const std::filesystem::path& path);

/// 8-bit binary PGM, linearly mapped from [min, max]; row 0 of the image is the top (largest y).
void write_pgm(const std::filesystem::path& path, const Grid& grid);

/// Whole-file text helpers.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace convint::io
