#pragma once

#include "hemofem/mesh.hpp"

namespace hemofem::fem {

struct SphereShellParams {
  double inner_radius = 25e-6;  // [m]
  double thickness = 2.5e-6;    // [m]
  int subdivisions = 2;         // octahedron refinements per shell surface
  int layers = 2;               // radial element layers
};

// Thick spherical shell of linear tets. Face sets: "inner" (oriented toward
// the center, i.e. into the enclosed blood pool) and "outer".
FeMesh generate_sphere_shell(const SphereShellParams& p);

struct LvEllipsoidParams {
  // truncated prolate ellipsoid wall: endocardial and epicardial semi-axes
  // (short = x,y; long = z), cut by the base plane z = base_z
  double endo_short = 0.030, endo_long = 0.065;  // [m]
  double epi_short = 0.040, epi_long = 0.075;    // [m]
  double base_z = 0.015;                         // [m]
  int n_circ = 12;   // circumferential divisions
  int n_long = 7;    // apex-to-base rings
  int n_trans = 2;   // transmural element layers
  double fiber_angle_endo_deg = 60.0;  // relative to circumferential
  double fiber_angle_epi_deg = -60.0;
};

// Idealized left ventricle with rule-based fiber/sheet fields. The fiber
// angle varies linearly across the wall between the endo and epi values;
// sheets are n x f with n the local ellipsoidal normal. Face sets: "endo"
// (into the cavity), "epi", "base".
FeMesh generate_lv_ellipsoid(const LvEllipsoidParams& p);

// Open hemispherical dome (surface only, no tets), face set "shell" oriented
// into the enclosed volume; its boundary is the equator circle. Used by the
// capping and flow-rate tests.
FeMesh generate_hemisphere_surface(double radius, int subdivisions);

}  // namespace hemofem::fem
