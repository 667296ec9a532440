#include "convint/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace convint::io {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw FormatError("cannot format number");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw FormatError("not a number: '" + std::string(text) + "'");
  return v;
}

void write_pattern(std::ostream& out, const PointPattern& pattern) {
  out << "x,y\n";
  for (const auto& p : pattern.points()) out << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

void write_pattern(const std::filesystem::path& path, const PointPattern& pattern) {
  auto out = open_out(path);
  write_pattern(out, pattern);
}

PointPattern read_pattern(std::istream& in, const Window& window) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x,y") throw FormatError("point pattern CSV must start with 'x,y'");
  std::vector<Point> pts;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 2) throw FormatError("point pattern row needs two fields: '" + line + "'");
    pts.push_back({parse_double(f[0]), parse_double(f[1])});
  }
  return PointPattern(std::move(pts), window);
}

PointPattern read_pattern(const std::filesystem::path& path, const Window& window) {
  auto in = open_in(path);
  return read_pattern(in, window);
}

void write_grid(std::ostream& out, const Grid& grid) {
  out << grid.nx() << ' ' << grid.ny() << ' ' << format_double(grid.window().width) << ' '
      << format_double(grid.window().height) << '\n';
  for (Eigen::Index j = 0; j < grid.ny(); ++j) {
    for (Eigen::Index i = 0; i < grid.nx(); ++i) {
      if (i) out << ' ';
      out << format_double(grid.values()(i, j));
    }
    out << '\n';
  }
}

void write_grid(const std::filesystem::path& path, const Grid& grid) {
  auto out = open_out(path);
  write_grid(out, grid);
}

Grid read_grid(std::istream& in) {
  long nx = 0;
  long ny = 0;
  std::string w;
  std::string h;
  if (!(in >> nx >> ny >> w >> h) || nx < 1 || ny < 1) throw FormatError("grid header must be 'nx ny width height'");
  const Window window(parse_double(w), parse_double(h));
  Eigen::MatrixXd values(nx, ny);
  std::string tok;
  for (long j = 0; j < ny; ++j)
    for (long i = 0; i < nx; ++i) {
      if (!(in >> tok)) throw FormatError("grid file ends early");
      values(i, j) = parse_double(tok);
    }
  if (in >> tok) throw FormatError("grid file has trailing values");
  return Grid(std::move(values), window);
}

Grid read_grid(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_grid(in);
}

void write_spectrum(std::ostream& out, const Spectrum& spectrum) {
  out << "kx,ky,re,im\n";
  out << "0,0," << format_double(spectrum.zero()) << ",0\n";
  for (const auto& [k, c] : spectrum.coefficients())
    out << k.kx << ',' << k.ky << ',' << format_double(c.real()) << ',' << format_double(c.imag()) << '\n';
}

void write_spectrum(const std::filesystem::path& path, const Spectrum& spectrum) {
  auto out = open_out(path);
  write_spectrum(out, spectrum);
}

Spectrum read_spectrum(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "kx,ky,re,im")
    throw FormatError("spectrum CSV must start with 'kx,ky,re,im'");
  Spectrum out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 4) throw FormatError("spectrum row needs four fields: '" + line + "'");
    const Frequency k{static_cast<int>(parse_double(f[0])), static_cast<int>(parse_double(f[1]))};
    const Complex c{parse_double(f[2]), parse_double(f[3])};
    if (k.is_zero() && c.imag() != 0.0) throw FormatError("zero-frequency row must have im = 0");
    out.set(k, c);
  }
  return out;
}

Spectrum read_spectrum(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_spectrum(in);
}

void write_pgm(const std::filesystem::path& path, const Grid& grid) {
  auto out = open_out(path);
  const double lo = grid.values().minCoeff();
  const double hi = grid.values().maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  out << "P5\n" << grid.nx() << ' ' << grid.ny() << "\n255\n";
  for (Eigen::Index j = grid.ny() - 1; j >= 0; --j)
    for (Eigen::Index i = 0; i < grid.nx(); ++i) {
      const double t = (grid.values()(i, j) - lo) / span;
      out.put(static_cast<char>(static_cast<unsigned char>(t * 255.0 + 0.5)));
    }
}

std::string read_text(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace convint::io
