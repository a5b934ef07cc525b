#pragma once

#include "hemofem/common.hpp"
#include "hemofem/mesh.hpp"

#include <span>

namespace hemofem::coupling {

using fem::Tri;

// Current nodal positions, one row per node.
using Coords = Eigen::Matrix<double, Eigen::Dynamic, 3>;

// Velocity flux and enclosed volume of an oriented triangle list in the
// given configuration. Triangle normals point into the enclosed blood
// region (outward from the tissue), so Q = integral of u.n equals -dV/dt
// for a closed surface. vel has 3 dofs per node; V uses the divergence
// theorem and is only meaningful when the list is closed.
struct FlowVolume {
  double Q = 0.0;
  double V = 0.0;
};
FlowVolume flow_rate_and_volume(std::span<const Tri> tris, const Coords& coords,
                                const Vec& vel);

// Adds P * integral(N_A n_i) over the triangles to the residual (momentum
// rows of the surface nodes).
void add_pressure_residual(std::span<const Tri> tris, const Coords& coords, double P,
                           Vec& R);

// d/dx_B of the pressure term above (the follower-load geometric tangent),
// times `factor` (chain factor from acceleration to position), appended as
// triplets of the global tangent.
void add_pressure_follower_tangent(std::span<const Tri> tris, const Coords& coords,
                                   double P, double factor,
                                   std::vector<Triplet>& triplets);

// (S)_{3A+i} = integral over the triangles of N_A n_i in the given
// configuration; returned dense over all dofs (nonzero only on surface
// nodes).
Vec integral_shape_normal(std::span<const Tri> tris, const Coords& coords, int n_dofs);

// Pairing of a 3D coupled Neumann surface (plus optional cap) with a 0D
// coupled node. The cap participates in flow-rate/volume integrals and in
// the right-hand rank-1 vectors, never in the pressure residual.
struct CoupledSurface {
  int index = 0;               // coupled index i (selector row)
  std::string face_set;        // name of Gamma
  std::vector<Tri> tris;       // Gamma triangles
  std::vector<Tri> cap;        // cap triangles (empty if Gamma is closed)
  std::string node;            // linked 0D node name

  // current values, refreshed by the coupled stepper
  double P = 0.0;  // [Pa]
  double Q = 0.0;  // [m^3/s]
  double V = 0.0;  // [m^3]

  std::vector<Tri> with_cap() const {
    std::vector<Tri> all = tris;
    all.insert(all.end(), cap.begin(), cap.end());
    return all;
  }
};

}  // namespace hemofem::coupling
