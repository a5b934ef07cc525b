#pragma once

#include "hemofem/common.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace hemofem::fem {

using Tri = std::array<int, 3>;
using Tet = std::array<int, 4>;

// Named oriented triangle list on the mesh boundary. Triangles are wound so
// the right-hand-rule normal points outward from the tissue domain (on a
// chamber's inner surface that is into the blood pool).
struct FaceSet {
  std::string name;
  std::vector<Tri> tris;
};

struct FeMesh {
  Eigen::Matrix<double, Eigen::Dynamic, 3> nodes;  // reference coordinates [m]
  std::vector<Tet> tets;
  std::vector<FaceSet> face_sets;
  // per-element fiber/sheet directions (empty if not provided)
  std::vector<Vec3> fibers;
  std::vector<Vec3> sheets;

  int n_nodes() const { return static_cast<int>(nodes.rows()); }
  int n_tets() const { return static_cast<int>(tets.size()); }
  int n_dofs() const { return 3 * n_nodes(); }

  const FaceSet& face_set(const std::string& name) const;
  bool has_face_set(const std::string& name) const;

  double tet_volume(int e) const;
  double total_volume() const;

  // Checks positive tet volumes, face-set triangles being faces of owned
  // tets, and unit/orthogonal fiber-sheet pairs. Throws MeshError.
  void validate() const;
};

FeMesh read_mesh(std::istream& in);
FeMesh read_mesh_file(const std::string& path);
void write_mesh(const FeMesh& mesh, std::ostream& out);
void write_mesh_file(const FeMesh& mesh, const std::string& path);

}  // namespace hemofem::fem
