#include "hemofem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hemofem::fem {

const FaceSet& FeMesh::face_set(const std::string& name) const {
  for (const auto& fs : face_sets)
    if (fs.name == name) return fs;
  throw MeshError("no face set named '" + name + "'");
}

bool FeMesh::has_face_set(const std::string& name) const {
  for (const auto& fs : face_sets)
    if (fs.name == name) return true;
  return false;
}

double FeMesh::tet_volume(int e) const {
  const auto& t = tets[static_cast<std::size_t>(e)];
  const Vec3 a = nodes.row(t[1]) - nodes.row(t[0]);
  const Vec3 b = nodes.row(t[2]) - nodes.row(t[0]);
  const Vec3 c = nodes.row(t[3]) - nodes.row(t[0]);
  return a.cross(b).dot(c) / 6.0;
}

double FeMesh::total_volume() const {
  double v = 0.0;
  for (int e = 0; e < n_tets(); ++e) v += tet_volume(e);
  return v;
}

void FeMesh::validate() const {
  for (int e = 0; e < n_tets(); ++e) {
    for (int k = 0; k < 4; ++k) {
      const int n = tets[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)];
      if (n < 0 || n >= n_nodes())
        throw MeshError("tet " + std::to_string(e) + " references node " + std::to_string(n));
    }
    if (tet_volume(e) <= 0.0)
      throw MeshError("tet " + std::to_string(e) + " has nonpositive reference volume");
  }

  // every face-set triangle must be a face of some tet
  std::set<std::array<int, 3>> tet_faces;
  for (const auto& t : tets) {
    const int f[4][3] = {{t[0], t[1], t[2]}, {t[0], t[1], t[3]}, {t[0], t[2], t[3]}, {t[1], t[2], t[3]}};
    for (const auto& face : f) {
      std::array<int, 3> key = {face[0], face[1], face[2]};
      std::sort(key.begin(), key.end());
      tet_faces.insert(key);
    }
  }
  for (const auto& fs : face_sets) {
    for (const auto& tri : fs.tris) {
      for (int n : tri)
        if (n < 0 || n >= n_nodes())
          throw MeshError("face set '" + fs.name + "' references node " + std::to_string(n));
      std::array<int, 3> key = {tri[0], tri[1], tri[2]};
      std::sort(key.begin(), key.end());
      if (!tets.empty() && !tet_faces.count(key))
        throw MeshError("face set '" + fs.name + "' triangle is not a tet face");
    }
  }

  if (!fibers.empty() && static_cast<int>(fibers.size()) != n_tets())
    throw MeshError("fiber field size does not match element count");
  if (!sheets.empty() && static_cast<int>(sheets.size()) != n_tets())
    throw MeshError("sheet field size does not match element count");
  for (std::size_t e = 0; e < fibers.size(); ++e) {
    if (std::abs(fibers[e].norm() - 1.0) > 1e-8)
      throw MeshError("fiber " + std::to_string(e) + " is not unit length");
    if (e < sheets.size()) {
      if (std::abs(sheets[e].norm() - 1.0) > 1e-8)
        throw MeshError("sheet " + std::to_string(e) + " is not unit length");
      if (std::abs(fibers[e].dot(sheets[e])) > 1e-8)
        throw MeshError("fiber and sheet " + std::to_string(e) + " are not orthogonal");
    }
  }
}

namespace {

std::string next_content_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;
    return line;
  }
  return {};
}

}  // namespace

FeMesh read_mesh(std::istream& in) {
  FeMesh mesh;
  std::string line = next_content_line(in);
  std::istringstream hdr(line);
  std::string tag;
  long n_nodes = 0;
  hdr >> tag >> n_nodes;
  if (tag != "nodes" || n_nodes <= 0) throw MeshError("mesh file: expected 'nodes <count>'");
  mesh.nodes.resize(n_nodes, 3);
  for (long i = 0; i < n_nodes; ++i) {
    std::istringstream ls(next_content_line(in));
    long id;
    double x, y, z;
    if (!(ls >> id >> x >> y >> z) || id != i)
      throw MeshError("mesh file: bad node line " + std::to_string(i));
    mesh.nodes.row(i) << x, y, z;
  }

  std::istringstream th(next_content_line(in));
  long n_tets = 0;
  th >> tag >> n_tets;
  if (tag != "tets" || n_tets < 0) throw MeshError("mesh file: expected 'tets <count>'");
  mesh.tets.resize(static_cast<std::size_t>(n_tets));
  for (long i = 0; i < n_tets; ++i) {
    std::istringstream ls(next_content_line(in));
    long id;
    Tet t;
    if (!(ls >> id >> t[0] >> t[1] >> t[2] >> t[3]) || id != i)
      throw MeshError("mesh file: bad tet line " + std::to_string(i));
    mesh.tets[static_cast<std::size_t>(i)] = t;
  }

  while (true) {
    line = next_content_line(in);
    if (line.empty()) break;
    std::istringstream ls(line);
    ls >> tag;
    if (tag == "faceset") {
      FaceSet fs;
      long count = 0;
      ls >> fs.name >> count;
      if (fs.name.empty() || count < 0) throw MeshError("mesh file: bad faceset header");
      for (long i = 0; i < count; ++i) {
        std::istringstream ts(next_content_line(in));
        std::string tri_tag;
        Tri tri;
        if (!(ts >> tri_tag >> tri[0] >> tri[1] >> tri[2]) || tri_tag != "tri")
          throw MeshError("mesh file: bad tri line in faceset '" + fs.name + "'");
        fs.tris.push_back(tri);
      }
      mesh.face_sets.push_back(std::move(fs));
    } else if (tag == "fibers" || tag == "sheets") {
      long count = 0;
      ls >> count;
      if (count != n_tets) throw MeshError("mesh file: fiber/sheet block must match tet count");
      auto& field = (tag == "fibers") ? mesh.fibers : mesh.sheets;
      field.resize(static_cast<std::size_t>(count));
      for (long i = 0; i < count; ++i) {
        std::istringstream vs(next_content_line(in));
        double x, y, z;
        if (!(vs >> x >> y >> z)) throw MeshError("mesh file: bad vector line");
        field[static_cast<std::size_t>(i)] = Vec3(x, y, z);
      }
    } else {
      throw MeshError("mesh file: unknown block '" + tag + "'");
    }
  }
  return mesh;
}

FeMesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(const FeMesh& mesh, std::ostream& out) {
  char buf[256];
  out << "nodes " << mesh.n_nodes() << "\n";
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    std::snprintf(buf, sizeof(buf), "%d %.17g %.17g %.17g\n", i, mesh.nodes(i, 0),
                  mesh.nodes(i, 1), mesh.nodes(i, 2));
    out << buf;
  }
  out << "tets " << mesh.n_tets() << "\n";
  for (int i = 0; i < mesh.n_tets(); ++i) {
    const auto& t = mesh.tets[static_cast<std::size_t>(i)];
    out << i << " " << t[0] << " " << t[1] << " " << t[2] << " " << t[3] << "\n";
  }
  for (const auto& fs : mesh.face_sets) {
    out << "faceset " << fs.name << " " << fs.tris.size() << "\n";
    for (const auto& tri : fs.tris)
      out << "tri " << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
  }
  auto write_field = [&](const char* tag, const std::vector<Vec3>& field) {
    if (field.empty()) return;
    out << tag << " " << field.size() << "\n";
    for (const auto& v : field) {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v[0], v[1], v[2]);
      out << buf;
    }
  };
  write_field("fibers", mesh.fibers);
  write_field("sheets", mesh.sheets);
}

void write_mesh_file(const FeMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file '" + path + "'");
  write_mesh(mesh, out);
}

}  // namespace hemofem::fem
