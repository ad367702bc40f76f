#include "shapeflow/mesh_io.hpp"

#include "shapeflow/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

namespace shapeflow {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_real(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw ParseError("malformed number '" + tok + "'", line);
  return v;
}

long parse_int(const std::string& tok, std::size_t line) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw ParseError("malformed index '" + tok + "'", line);
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

TriMesh read_obj(const std::filesystem::path& path, bool require_closed_genus0) {
  std::ifstream in = open_in(path);
  std::vector<Vec3> verts;
  std::vector<Face> faces;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream is(line);
    std::string tag;
    if (!(is >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      std::string x, y, z;
      if (!(is >> x >> y >> z)) throw ParseError("vertex record needs three coordinates", line_no);
      verts.emplace_back(parse_real(x, line_no), parse_real(y, line_no), parse_real(z, line_no));
    } else if (tag == "f") {
      std::vector<int> poly;
      for (std::string tok; is >> tok;) {
        const long raw = parse_int(tok.substr(0, tok.find('/')), line_no);
        const long idx = raw > 0 ? raw - 1 : static_cast<long>(verts.size()) + raw;
        if (raw == 0 || idx < 0 || idx >= static_cast<long>(verts.size())) {
          throw ParseError("face index " + std::to_string(raw) + " out of range", line_no);
        }
        poly.push_back(static_cast<int>(idx));
      }
      if (poly.size() < 3) throw ParseError("face record needs at least three indices", line_no);
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) faces.push_back({poly[0], poly[k], poly[k + 1]});
    }
  }
  TriMesh mesh(std::move(verts), std::move(faces));
  if (require_closed_genus0) mesh.validate_closed_genus0();
  return mesh;
}

void write_obj(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  for (const Vec3& v : mesh.vertices()) out << "v " << fmt(v.x()) << ' ' << fmt(v.y()) << ' ' << fmt(v.z()) << '\n';
  for (const Face& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_ply(const TriMesh& mesh, std::span<const double> quality, const std::filesystem::path& path) {
  if (quality.size() != mesh.vertex_count()) throw InvalidArgument("write_ply: one quality value per vertex required");
  std::ofstream out = open_out(path);
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << mesh.vertex_count() << '\n';
  out << "property double x\nproperty double y\nproperty double z\nproperty float quality\n";
  out << "element face " << mesh.face_count() << '\n';
  out << "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    const Vec3& v = mesh.vertex(i);
    out << fmt(v.x()) << ' ' << fmt(v.y()) << ' ' << fmt(v.z()) << ' ' << fmt(static_cast<float>(quality[i])) << '\n';
  }
  for (const Face& f : mesh.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

PlyMesh read_ply(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw ParseError("unexpected end of file", line_no + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  next_line();
  if (line != "ply") throw ParseError("missing 'ply' magic", line_no);
  std::size_t nv = 0, nf = 0;
  std::vector<std::string> vprops;
  std::string current;
  for (;;) {
    next_line();
    std::istringstream is(line);
    std::string word;
    is >> word;
    if (word == "end_header") break;
    if (word == "format") {
      std::string f;
      is >> f;
      if (f != "ascii") throw ParseError("only ASCII PLY is supported", line_no);
    } else if (word == "element") {
      std::string count;
      is >> current >> count;
      const long n = parse_int(count, line_no);
      if (n < 0) throw ParseError("negative element count", line_no);
      if (current == "vertex") nv = static_cast<std::size_t>(n);
      else if (current == "face") nf = static_cast<std::size_t>(n);
    } else if (word == "property" && current == "vertex") {
      std::string type, name;
      is >> type >> name;
      vprops.push_back(name);
    }
  }
  auto find_prop = [&](const std::string& n) -> int {
    for (std::size_t i = 0; i < vprops.size(); ++i) {
      if (vprops[i] == n) return static_cast<int>(i);
    }
    return -1;
  };
  const int ix = find_prop("x"), iy = find_prop("y"), iz = find_prop("z"), iq = find_prop("quality");
  if (ix < 0 || iy < 0 || iz < 0) throw ParseError("vertex element lacks x, y, z", line_no);

  PlyMesh out;
  std::vector<Vec3> verts(nv);
  out.quality.assign(nv, 0.0);
  for (std::size_t i = 0; i < nv; ++i) {
    next_line();
    std::istringstream is(line);
    std::vector<double> vals;
    for (std::string tok; is >> tok;) vals.push_back(parse_real(tok, line_no));
    if (vals.size() != vprops.size()) throw ParseError("vertex record has wrong property count", line_no);
    verts[i] = Vec3(vals[ix], vals[iy], vals[iz]);
    if (iq >= 0) out.quality[i] = vals[iq];
  }
  std::vector<Face> faces;
  faces.reserve(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    next_line();
    std::istringstream is(line);
    std::vector<long> idx;
    for (std::string tok; is >> tok;) idx.push_back(parse_int(tok, line_no));
    if (idx.empty() || idx[0] != static_cast<long>(idx.size()) - 1 || idx[0] < 3) {
      throw ParseError("malformed face record", line_no);
    }
    for (long k = 2; k + 1 < static_cast<long>(idx.size()); ++k) {
      faces.push_back({static_cast<int>(idx[1]), static_cast<int>(idx[k]), static_cast<int>(idx[k + 1])});
    }
  }
  out.mesh = TriMesh(std::move(verts), std::move(faces));
  return out;
}

}  // namespace shapeflow
