#include "hemofem/cap.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hemofem::coupling {

using fem::Tri;

std::vector<int> boundary_loop(std::span<const Tri> tris) {
  // Directed edges of the winding; an edge is on the boundary when its
  // reverse never appears.
  std::set<std::pair<int, int>> edges;
  for (const auto& t : tris) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[static_cast<std::size_t>(k)];
      const int b = t[static_cast<std::size_t>((k + 1) % 3)];
      if (!edges.insert({a, b}).second)
        throw CouplingError("non-manifold surface: repeated directed edge");
    }
  }
  std::map<int, int> next;
  for (const auto& [a, b] : edges) {
    if (edges.count({b, a})) continue;  // interior edge
    if (next.count(a))
      throw CouplingError("non-manifold surface boundary at node " + std::to_string(a));
    next[a] = b;
  }
  if (next.empty()) return {};

  std::vector<int> loop;
  const int start = next.begin()->first;
  int cur = start;
  do {
    loop.push_back(cur);
    auto it = next.find(cur);
    if (it == next.end())
      throw CouplingError("open boundary chain at node " + std::to_string(cur));
    cur = it->second;
    if (loop.size() > next.size())
      throw CouplingError("boundary does not close into a loop");
  } while (cur != start);
  if (loop.size() != next.size())
    throw CouplingError("surface boundary has more than one loop; supply the cap explicitly");
  return loop;
}

int euler_characteristic(std::span<const Tri> tris) {
  std::set<int> verts;
  std::set<std::pair<int, int>> edges;
  for (const auto& t : tris) {
    for (int k = 0; k < 3; ++k) {
      verts.insert(t[static_cast<std::size_t>(k)]);
      const int a = t[static_cast<std::size_t>(k)];
      const int b = t[static_cast<std::size_t>((k + 1) % 3)];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  return static_cast<int>(verts.size()) - static_cast<int>(edges.size()) +
         static_cast<int>(tris.size());
}

namespace {

bool segments_intersect_2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                           const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
  auto cross2 = [](const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    return u[0] * v[1] - u[1] * v[0];
  };
  const double d1 = cross2(b - a, c - a);
  const double d2 = cross2(b - a, d - a);
  const double d3 = cross2(d - c, a - c);
  const double d4 = cross2(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

std::vector<Tri> build_cap(const Coords& coords, std::span<const Tri> tris) {
  std::vector<int> loop = boundary_loop(tris);
  if (loop.empty()) return {};
  if (loop.size() < 3) throw CouplingError("boundary loop has fewer than 3 nodes");

  // The cap must traverse each boundary edge opposite to the surface winding.
  std::reverse(loop.begin(), loop.end());
  const int n = static_cast<int>(loop.size());

  // Best-fit plane via Newell's rule on the (reversed) polygon.
  Vec3 normal = Vec3::Zero();
  Vec3 centroid = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    const Vec3 p = coords.row(loop[static_cast<std::size_t>(i)]);
    const Vec3 q = coords.row(loop[static_cast<std::size_t>((i + 1) % n)]);
    normal += p.cross(q);
    centroid += p;
  }
  centroid /= n;
  if (normal.norm() < 1e-30) throw CouplingError("degenerate boundary loop");
  normal.normalize();
  Vec3 e1 = normal.cross(Vec3(1, 0, 0));
  if (e1.norm() < 1e-6) e1 = normal.cross(Vec3(0, 1, 0));
  e1.normalize();
  const Vec3 e2 = normal.cross(e1);

  std::vector<Eigen::Vector2d> pts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Vec3 p = Vec3(coords.row(loop[static_cast<std::size_t>(i)])) - centroid;
    pts[static_cast<std::size_t>(i)] = {p.dot(e1), p.dot(e2)};
  }

  // Reject self-intersecting loops up front.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent around the wrap
      if (segments_intersect_2d(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>((i + 1) % n)],
                                pts[static_cast<std::size_t>(j)], pts[static_cast<std::size_t>((j + 1) % n)]))
        throw CouplingError("boundary loop self-intersects in its plane; supply the cap explicitly");
    }
  }

  // Ear clipping, in the polygon's own orientation.
  auto cross2 = [](const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    return u[0] * v[1] - u[1] * v[0];
  };
  double signed_area = 0.0;
  for (int i = 0; i < n; ++i)
    signed_area += cross2(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>((i + 1) % n)]);
  const double orient = signed_area >= 0 ? 1.0 : -1.0;

  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::vector<Tri> cap;
  int guard = 0;
  while (idx.size() > 3) {
    if (++guard > 10 * n)
      throw CouplingError("ear clipping failed; supply the cap explicitly");
    bool clipped = false;
    const int m = static_cast<int>(idx.size());
    for (int k = 0; k < m; ++k) {
      const int ip = idx[static_cast<std::size_t>((k + m - 1) % m)];
      const int ic = idx[static_cast<std::size_t>(k)];
      const int in = idx[static_cast<std::size_t>((k + 1) % m)];
      const auto &A = pts[static_cast<std::size_t>(ip)], &B = pts[static_cast<std::size_t>(ic)],
                 &C = pts[static_cast<std::size_t>(in)];
      if (orient * cross2(B - A, C - A) <= 1e-18) continue;  // reflex or degenerate
      bool contains = false;
      for (int other : idx) {
        if (other == ip || other == ic || other == in) continue;
        const auto& P = pts[static_cast<std::size_t>(other)];
        const double s1 = orient * cross2(B - A, P - A);
        const double s2 = orient * cross2(C - B, P - B);
        const double s3 = orient * cross2(A - C, P - C);
        if (s1 >= 0 && s2 >= 0 && s3 >= 0) {
          contains = true;
          break;
        }
      }
      if (contains) continue;
      cap.push_back({loop[static_cast<std::size_t>(ip)], loop[static_cast<std::size_t>(ic)],
                     loop[static_cast<std::size_t>(in)]});
      idx.erase(idx.begin() + k);
      clipped = true;
      break;
    }
    if (!clipped) throw CouplingError("no ear found; supply the cap explicitly");
  }
  cap.push_back({loop[static_cast<std::size_t>(idx[0])], loop[static_cast<std::size_t>(idx[1])],
                 loop[static_cast<std::size_t>(idx[2])]});
  return cap;
}

}  // namespace hemofem::coupling
