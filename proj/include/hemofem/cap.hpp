#pragma once

#include "hemofem/mesh.hpp"
#include "hemofem/surface.hpp"

namespace hemofem::coupling {

// Closes an open oriented surface with a triangulation of its boundary loop,
// using only the existing boundary nodes (ear clipping of the loop polygon
// projected onto its best-fit plane). The cap winding continues the surface
// orientation, so the union bounds the enclosed blood volume. Returns an
// empty list when the surface is already closed. Throws CouplingError on a
// non-manifold boundary, more than one loop, or a self-intersecting loop.
std::vector<fem::Tri> build_cap(const Coords& coords, std::span<const fem::Tri> tris);

// Extracts the single closed boundary loop (directed along the surface
// winding); empty if the surface is closed.
std::vector<int> boundary_loop(std::span<const fem::Tri> tris);

// V - E + F of the union surface; 2 for a topological sphere.
int euler_characteristic(std::span<const fem::Tri> tris);

}  // namespace hemofem::coupling
