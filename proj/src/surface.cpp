#include "hemofem/surface.hpp"

namespace hemofem::coupling {

namespace {
inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0, -v[2], v[1], v[2], 0, -v[0], -v[1], v[0], 0;
  return s;
}
}  // namespace

FlowVolume flow_rate_and_volume(std::span<const Tri> tris, const Coords& coords,
                                const Vec& vel) {
  FlowVolume out;
  for (const auto& t : tris) {
    const Vec3 x1 = coords.row(t[0]), x2 = coords.row(t[1]), x3 = coords.row(t[2]);
    const Vec3 c = (x2 - x1).cross(x3 - x1);  // 2 * area * n, n into the blood
    if (vel.size() > 0) {
      const Vec3 u = vel.segment<3>(3 * t[0]) + vel.segment<3>(3 * t[1]) +
                     vel.segment<3>(3 * t[2]);
      out.Q += u.dot(c) / 6.0;
    }
    // divergence theorem with the blood-outward normal -n
    out.V -= c.dot(x1 + x2 + x3) / 18.0;
  }
  return out;
}

void add_pressure_residual(std::span<const Tri> tris, const Coords& coords, double P,
                           Vec& R) {
  for (const auto& t : tris) {
    const Vec3 x1 = coords.row(t[0]), x2 = coords.row(t[1]), x3 = coords.row(t[2]);
    const Vec3 load = (P / 6.0) * (x2 - x1).cross(x3 - x1);  // P * integral(N_A n)
    for (int k = 0; k < 3; ++k) R.segment<3>(3 * t[static_cast<std::size_t>(k)]) += load;
  }
}

void add_pressure_follower_tangent(std::span<const Tri> tris, const Coords& coords,
                                   double P, double factor,
                                   std::vector<Triplet>& triplets) {
  for (const auto& t : tris) {
    const Vec3 x[3] = {coords.row(t[0]), coords.row(t[1]), coords.row(t[2])};
    // c = x1 x x2 + x2 x x3 + x3 x x1; dc/dx_B = skew(x_{B+2} - x_{B+1})
    for (int bb = 0; bb < 3; ++bb) {
      const Mat3 dc = skew(x[(bb + 2) % 3] - x[(bb + 1) % 3]);
      const Mat3 block = (P / 6.0) * factor * dc;
      for (int aa = 0; aa < 3; ++aa) {
        const int ra = 3 * t[static_cast<std::size_t>(aa)];
        const int cb = 3 * t[static_cast<std::size_t>(bb)];
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            if (block(i, j) != 0.0) triplets.emplace_back(ra + i, cb + j, block(i, j));
      }
    }
  }
}

Vec integral_shape_normal(std::span<const Tri> tris, const Coords& coords, int n_dofs) {
  Vec s = Vec::Zero(n_dofs);
  for (const auto& t : tris) {
    const Vec3 x1 = coords.row(t[0]), x2 = coords.row(t[1]), x3 = coords.row(t[2]);
    const Vec3 c6 = (x2 - x1).cross(x3 - x1) / 6.0;
    for (int k = 0; k < 3; ++k) s.segment<3>(3 * t[static_cast<std::size_t>(k)]) += c6;
  }
  return s;
}

}  // namespace hemofem::coupling
