#include "hemofem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hemofem::fem {

namespace {

struct SurfaceMesh {
  std::vector<Vec3> verts;
  std::vector<Tri> tris;  // oriented
};

// Octahedron subdivided on the unit sphere; faces wound outward.
SurfaceMesh unit_sphere(int subdivisions) {
  SurfaceMesh s;
  s.verts = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  s.tris = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
            {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const Vec3 m = (s.verts[static_cast<std::size_t>(a)] +
                      s.verts[static_cast<std::size_t>(b)])
                         .normalized();
      const int id = static_cast<int>(s.verts.size());
      s.verts.push_back(m);
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Tri> next;
    next.reserve(s.tris.size() * 4);
    for (const auto& t : s.tris) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    s.tris = std::move(next);
  }
  return s;
}

// Decomposes the prism between two copies of an oriented triangle into three
// tets. Column node ids must be globally unique; vertical quad diagonals
// follow the sorted-bottom-id rule, so neighboring prisms conform.
void emit_prism_tets(const std::array<std::pair<int, int>, 3>& cols_in,
                     const FeMesh& mesh, std::vector<Tet>& out) {
  auto cols = cols_in;
  std::sort(cols.begin(), cols.end(),
            [](const auto& u, const auto& v) { return u.first < v.first; });
  const int a0 = cols[0].first, a1 = cols[0].second;
  const int b0 = cols[1].first, b1 = cols[1].second;
  const int c0 = cols[2].first, c1 = cols[2].second;
  const Tet cand[3] = {{a0, b0, c0, a1}, {b0, c0, a1, b1}, {c0, a1, b1, c1}};
  for (Tet t : cand) {
    const Vec3 p0 = mesh.nodes.row(t[0]), p1 = mesh.nodes.row(t[1]),
               p2 = mesh.nodes.row(t[2]), p3 = mesh.nodes.row(t[3]);
    if ((p1 - p0).cross(p2 - p0).dot(p3 - p0) < 0.0) std::swap(t[2], t[3]);
    out.push_back(t);
  }
}

// Diagonal of a boundary quad (u0,v0,v1,u1) consistent with emit_prism_tets:
// it runs from the top of the smaller-bottom-id column to the bottom of the
// other one.
void emit_quad_tris(int u0, int u1, int v0, int v1, std::vector<Tri>& out) {
  if (u0 < v0) {
    out.push_back({u0, v0, u1});
    out.push_back({v0, v1, u1});
  } else {
    out.push_back({u0, v0, v1});
    out.push_back({u0, v1, u1});
  }
}

void orient_by_direction(FeMesh& mesh, std::vector<Tri>& tris, const Vec3& dir) {
  for (auto& t : tris) {
    const Vec3 a = mesh.nodes.row(t[0]), b = mesh.nodes.row(t[1]), c = mesh.nodes.row(t[2]);
    if ((b - a).cross(c - a).dot(dir) < 0.0) std::swap(t[1], t[2]);
  }
}

}  // namespace

FeMesh generate_sphere_shell(const SphereShellParams& p) {
  if (p.inner_radius <= 0 || p.thickness <= 0 || p.subdivisions < 0 || p.layers < 1)
    throw MeshError("sphere shell: degenerate parameters");
  const SurfaceMesh surf = unit_sphere(p.subdivisions);
  const int nv = static_cast<int>(surf.verts.size());
  const int n_layers = p.layers;

  FeMesh mesh;
  mesh.nodes.resize(static_cast<Eigen::Index>(nv) * (n_layers + 1), 3);
  for (int l = 0; l <= n_layers; ++l) {
    const double r = p.inner_radius + p.thickness * l / n_layers;
    for (int v = 0; v < nv; ++v)
      mesh.nodes.row(static_cast<Eigen::Index>(l) * nv + v) = r * surf.verts[static_cast<std::size_t>(v)];
  }
  for (int l = 0; l < n_layers; ++l) {
    for (const auto& t : surf.tris) {
      std::array<std::pair<int, int>, 3> cols;
      for (int k = 0; k < 3; ++k)
        cols[static_cast<std::size_t>(k)] = {l * nv + t[static_cast<std::size_t>(k)],
                                             (l + 1) * nv + t[static_cast<std::size_t>(k)]};
      emit_prism_tets(cols, mesh, mesh.tets);
    }
  }

  FaceSet inner{"inner", {}};
  FaceSet outer{"outer", {}};
  for (const auto& t : surf.tris) {
    // inner wall: tissue-outward points to the center, so reverse the winding
    inner.tris.push_back({t[0], t[2], t[1]});
    outer.tris.push_back({n_layers * nv + t[0], n_layers * nv + t[1], n_layers * nv + t[2]});
  }
  mesh.face_sets = {inner, outer};
  return mesh;
}

FeMesh generate_lv_ellipsoid(const LvEllipsoidParams& p) {
  if (p.endo_short <= 0 || p.endo_long <= 0 || p.epi_short <= p.endo_short ||
      p.epi_long <= p.endo_long || p.n_circ < 3 || p.n_long < 2 || p.n_trans < 1)
    throw MeshError("lv ellipsoid: degenerate parameters");
  if (p.base_z <= 0 || p.base_z >= p.endo_long)
    throw MeshError("lv ellipsoid: base plane must cut the ellipsoid above center");

  const int nc = p.n_circ, nl = p.n_long, nt = p.n_trans;
  const int nodes_per_layer = 1 + nl * nc;

  auto a_of = [&](double s) { return p.endo_short + s * (p.epi_short - p.endo_short); };
  auto c_of = [&](double s) { return p.endo_long + s * (p.epi_long - p.endo_long); };

  FeMesh mesh;
  mesh.nodes.resize(static_cast<Eigen::Index>(nodes_per_layer) * (nt + 1), 3);
  auto node_id = [&](int layer, int ring, int k) {
    // ring 0 is the apex point
    if (ring == 0) return layer * nodes_per_layer;
    return layer * nodes_per_layer + 1 + (ring - 1) * nc + (k % nc);
  };
  for (int l = 0; l <= nt; ++l) {
    const double s = static_cast<double>(l) / nt;
    const double a = a_of(s), c = c_of(s);
    const double phi_base = std::acos(-p.base_z / c);
    mesh.nodes.row(node_id(l, 0, 0)) << 0.0, 0.0, -c;
    for (int j = 1; j <= nl; ++j) {
      const double phi = phi_base * j / nl;
      for (int k = 0; k < nc; ++k) {
        const double th = 2.0 * M_PI * k / nc;
        mesh.nodes.row(node_id(l, j, k))
            << a * std::sin(phi) * std::cos(th), a * std::sin(phi) * std::sin(th),
            -c * std::cos(phi);
      }
    }
  }

  // Template triangulation of the wall surface, wound outward (toward epi).
  std::vector<Tri> templ;  // in layer-0 ids
  for (int k = 0; k < nc; ++k)
    templ.push_back({node_id(0, 0, 0), node_id(0, 1, k + 1), node_id(0, 1, k)});
  for (int j = 1; j < nl; ++j) {
    for (int k = 0; k < nc; ++k) {
      const int a0 = node_id(0, j, k), b0 = node_id(0, j, k + 1);
      const int c0 = node_id(0, j + 1, k + 1), d0 = node_id(0, j + 1, k);
      // quad (a,b,c,d); split along the diagonal holding the smallest id
      const int m = std::min({a0, b0, c0, d0});
      if (m == a0 || m == c0) {
        templ.push_back({a0, b0, c0});
        templ.push_back({a0, c0, d0});
      } else {
        templ.push_back({a0, b0, d0});
        templ.push_back({b0, c0, d0});
      }
    }
  }

  std::vector<int> tet_layer;  // transmural layer of each tet, for fibers
  for (int l = 0; l < nt; ++l) {
    for (const auto& t : templ) {
      std::array<std::pair<int, int>, 3> cols;
      for (int k = 0; k < 3; ++k)
        cols[static_cast<std::size_t>(k)] = {t[static_cast<std::size_t>(k)] + l * nodes_per_layer,
                                             t[static_cast<std::size_t>(k)] + (l + 1) * nodes_per_layer};
      emit_prism_tets(cols, mesh, mesh.tets);
      tet_layer.push_back(l);
      tet_layer.push_back(l);
      tet_layer.push_back(l);
    }
  }

  FaceSet endo{"endo", {}};
  FaceSet epi{"epi", {}};
  for (const auto& t : templ) {
    endo.tris.push_back({t[0], t[2], t[1]});  // into the cavity
    epi.tris.push_back({t[0] + nt * nodes_per_layer, t[1] + nt * nodes_per_layer,
                        t[2] + nt * nodes_per_layer});
  }
  FaceSet base{"base", {}};
  for (int l = 0; l < nt; ++l) {
    for (int k = 0; k < nc; ++k) {
      const int u0 = node_id(l, nl, k), u1 = node_id(l + 1, nl, k);
      const int v0 = node_id(l, nl, k + 1), v1 = node_id(l + 1, nl, k + 1);
      emit_quad_tris(u0, u1, v0, v1, base.tris);
    }
  }
  orient_by_direction(mesh, base.tris, Vec3(0, 0, 1));
  mesh.face_sets = {endo, epi, base};

  // Rule-based fiber and sheet fields, per element.
  const double alpha_endo = p.fiber_angle_endo_deg * M_PI / 180.0;
  const double alpha_epi = p.fiber_angle_epi_deg * M_PI / 180.0;
  mesh.fibers.resize(mesh.tets.size());
  mesh.sheets.resize(mesh.tets.size());
  for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
    const auto& t = mesh.tets[e];
    const Vec3 x = 0.25 * (mesh.nodes.row(t[0]) + mesh.nodes.row(t[1]) +
                           mesh.nodes.row(t[2]) + mesh.nodes.row(t[3]));
    const double s = (tet_layer[e] + 0.5) / nt;
    const double am = a_of(s), cm = c_of(s);
    Vec3 n(x[0] / (am * am), x[1] / (am * am), x[2] / (cm * cm));
    n.normalize();
    Vec3 circ = Vec3(0, 0, 1).cross(n);
    if (circ.norm() < 1e-8) circ = Vec3(0, 1, 0);  // apex axis fallback
    circ.normalize();
    const Vec3 longit = n.cross(circ).normalized();
    const double alpha = alpha_endo + s * (alpha_epi - alpha_endo);
    const Vec3 f = std::cos(alpha) * circ + std::sin(alpha) * longit;
    mesh.fibers[e] = f.normalized();
    mesh.sheets[e] = n.cross(f).normalized();
  }
  return mesh;
}

FeMesh generate_hemisphere_surface(double radius, int subdivisions) {
  if (radius <= 0) throw MeshError("hemisphere: radius must be positive");
  SurfaceMesh s;
  s.verts = {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}, {0, 0, 1}};
  s.tris = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const Vec3 m = (s.verts[static_cast<std::size_t>(a)] +
                      s.verts[static_cast<std::size_t>(b)])
                         .normalized();
      const int id = static_cast<int>(s.verts.size());
      s.verts.push_back(m);
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Tri> next;
    for (const auto& t : s.tris) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    s.tris = std::move(next);
  }
  FeMesh mesh;
  mesh.nodes.resize(static_cast<Eigen::Index>(s.verts.size()), 3);
  for (std::size_t v = 0; v < s.verts.size(); ++v)
    mesh.nodes.row(static_cast<Eigen::Index>(v)) = radius * s.verts[v];
  FaceSet shell{"shell", {}};
  for (const auto& t : s.tris) shell.tris.push_back({t[0], t[2], t[1]});  // into the dome
  mesh.face_sets = {shell};
  return mesh;
}

}  // namespace hemofem::fem
