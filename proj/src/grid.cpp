#include "shapeflow/grid.hpp"

#include "shapeflow/errors.hpp"
#include "shapeflow/kernels.hpp"

#include "grid_internal.hpp"

#include <algorithm>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace shapeflow {

GridSpec GridSpec::cube(int n, double lo, double hi) {
  if (n < 2 || !(hi > lo)) throw InvalidArgument("cube grid needs n >= 2 and hi > lo");
  const double h = (hi - lo) / (n - 1);
  GridSpec spec;
  spec.dims = {n, n, n};
  spec.origin = Vec3::Constant(lo);
  spec.spacing = Vec3::Constant(h);
  return spec;
}

void GridSpec::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 2) throw InvalidArgument("grid dims must all be >= 2");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) throw InvalidArgument("grid spacing must be positive");
    if (!std::isfinite(origin[a])) throw InvalidArgument("grid origin must be finite");
  }
}

ScalarGrid::ScalarGrid(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  values_.assign(spec_.node_count(), 0.0);
}

ScalarGrid::ScalarGrid(const GridSpec& spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.node_count()) {
    throw InvalidArgument("grid has " + std::to_string(values_.size()) + " values, expected " +
                          std::to_string(spec_.node_count()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("grid values must be finite");
  }
}

bool inside_margin(const GridSpec& spec, const Vec3& p, double margin_cells) {
  const Vec3 up = spec.upper();
  for (int a = 0; a < 3; ++a) {
    const double lo = spec.origin[a] + margin_cells * spec.spacing[a];
    const double hi = up[a] - margin_cells * spec.spacing[a];
    if (!(p[a] >= lo && p[a] <= hi)) return false;
  }
  return true;
}

namespace detail {

// Lower-corner node index and fractional offsets of p (caller checked the domain).
void locate(const GridSpec& spec, const Vec3& p, std::int64_t& base, double& fx, double& fy, double& fz) {
  std::array<double, 3> frac{};
  std::array<std::int64_t, 3> cell{};
  for (int a = 0; a < 3; ++a) {
    const double u = (p[a] - spec.origin[a]) / spec.spacing[a];
    auto c = static_cast<std::int64_t>(std::floor(u));
    c = std::clamp<std::int64_t>(c, 0, spec.dims[a] - 2);
    cell[a] = c;
    frac[a] = u - static_cast<double>(c);
  }
  base = cell[0] + spec.dims[0] * (cell[1] + spec.dims[1] * cell[2]);
  fx = frac[0];
  fy = frac[1];
  fz = frac[2];
}

}  // namespace detail

double sample_trilinear(const ScalarGrid& grid, const Vec3& p, double margin_cells) {
  const GridSpec& spec = grid.spec();
  if (!inside_margin(spec, p, margin_cells)) {
    std::ostringstream os;
    os << "point (" << p.x() << ", " << p.y() << ", " << p.z() << ") is outside the sampling domain";
    throw OutOfDomain(os.str());
  }
  std::int64_t base = 0;
  double fx = 0, fy = 0, fz = 0;
  detail::locate(spec, p, base, fx, fy, fz);
  const kernels::StencilView s{{&base, 1}, {&fx, 1}, {&fy, 1}, {&fz, 1}};
  double out = 0.0;
  kernels::detail::trilinear_blend_scalar(grid.values().data(), spec.dims[0],
                                          static_cast<std::int64_t>(spec.dims[0]) * spec.dims[1], s, &out, 1);
  return out;
}

namespace {

template <class Op>
ScalarGrid pointwise(const ScalarGrid& a, const ScalarGrid& b, Op op) {
  if (!(a.spec() == b.spec())) throw InvalidArgument("CSG operands must share a grid");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a.values()[i], b.values()[i]);
  return ScalarGrid(a.spec(), std::move(out));
}

}  // namespace

ScalarGrid csg_union(const ScalarGrid& a, const ScalarGrid& b) {
  return pointwise(a, b, [](double x, double y) { return std::min(x, y); });
}
ScalarGrid csg_intersect(const ScalarGrid& a, const ScalarGrid& b) {
  return pointwise(a, b, [](double x, double y) { return std::max(x, y); });
}
ScalarGrid csg_complement(const ScalarGrid& a) {
  return pointwise(a, a, [](double x, double) { return -x; });
}
ScalarGrid csg_subtract(const ScalarGrid& a, const ScalarGrid& b) {
  return pointwise(a, b, [](double x, double y) { return std::max(x, -y); });
}

// ---------------------------------------------------------------------------
// SDF1

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return r;
  }
}

std::string read_header_line(std::istream& in, std::size_t line_no) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("unexpected end of file in SDF1 header", line_no);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

double parse_double(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("malformed number '" + std::string(tok) + "'", line_no);
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

}  // namespace

void write_sdf1(const ScalarGrid& grid, const std::filesystem::path& path, Sdf1Encoding encoding) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const GridSpec& s = grid.spec();
  out << "SDF1\n";
  out << "dims " << s.dims[0] << ' ' << s.dims[1] << ' ' << s.dims[2] << '\n';
  out << "origin " << format_double(s.origin.x()) << ' ' << format_double(s.origin.y()) << ' '
      << format_double(s.origin.z()) << '\n';
  out << "spacing " << format_double(s.spacing.x()) << ' ' << format_double(s.spacing.y()) << ' '
      << format_double(s.spacing.z()) << '\n';
  if (encoding == Sdf1Encoding::Le64) {
    out << "data le64\n";
    std::vector<std::uint64_t> raw(grid.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = to_little_endian(std::bit_cast<std::uint64_t>(grid.values()[i]));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t)));
  } else {
    out << "data ascii\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out << format_double(grid.values()[i]) << ((i + 1) % static_cast<std::size_t>(s.dims[0]) == 0 ? '\n' : ' ');
    }
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ScalarGrid read_sdf1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  if (read_header_line(in, 1) != "SDF1") throw ParseError("missing SDF1 magic", 1);

  GridSpec spec;
  auto dims = split(read_header_line(in, 2));
  if (dims.size() != 4 || dims[0] != "dims") throw ParseError("expected 'dims nx ny nz'", 2);
  for (int a = 0; a < 3; ++a) {
    int v = 0;
    const std::string& t = dims[a + 1];
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) throw ParseError("malformed dimension '" + t + "'", 2);
    spec.dims[a] = v;
  }
  auto origin = split(read_header_line(in, 3));
  if (origin.size() != 4 || origin[0] != "origin") throw ParseError("expected 'origin ox oy oz'", 3);
  for (int a = 0; a < 3; ++a) spec.origin[a] = parse_double(origin[a + 1], 3);
  auto spacing = split(read_header_line(in, 4));
  if (spacing.size() != 4 || spacing[0] != "spacing") throw ParseError("expected 'spacing sx sy sz'", 4);
  for (int a = 0; a < 3; ++a) spec.spacing[a] = parse_double(spacing[a + 1], 4);
  if (!(spec.spacing.array() > 0.0).all()) throw ParseError("spacing must be positive", 4);
  try {
    spec.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 2);
  }
  const std::string data = read_header_line(in, 5);

  std::vector<double> values(spec.node_count());
  if (data == "data le64") {
    std::vector<std::uint64_t> raw(values.size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t)));
    if (static_cast<std::size_t>(in.gcount()) != raw.size() * sizeof(std::uint64_t)) {
      throw ParseError("truncated le64 payload", 6);
    }
    for (std::size_t i = 0; i < raw.size(); ++i) values[i] = std::bit_cast<double>(to_little_endian(raw[i]));
  } else if (data == "data ascii") {
    std::size_t line_no = 5;
    std::size_t k = 0;
    std::string line;
    while (k < values.size() && std::getline(in, line)) {
      ++line_no;
      for (const auto& tok : split(line)) {
        if (k == values.size()) throw ParseError("too many values", line_no);
        values[k++] = parse_double(tok, line_no);
      }
    }
    if (k != values.size()) throw ParseError("expected " + std::to_string(values.size()) + " values, got " + std::to_string(k), line_no);
  } else {
    throw ParseError("expected 'data le64' or 'data ascii'", 5);
  }
  try {
    return ScalarGrid(spec, std::move(values));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 0);
  }
}

}  // namespace shapeflow
