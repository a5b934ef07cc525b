#pragma once

#include "hemofem/common.hpp"

namespace hemofem::fem {

enum class MaterialKind { HolzapfelOgden, NeoHookean };

// Passive tissue parameters. The Holzapfel-Ogden energy is
//   psi = a/2b (e^{b(I1bar-3)} - 1)
//       + sum_{i in f,s} chi(I4i) a_i/2b_i (e^{b_i (I4i-1)^2} - 1)
//       + a_fs/2b_fs (e^{b_fs I8fs^2} - 1)
// with chi a smoothed Heaviside gate (tension-only fiber recruitment),
// plus a volumetric penalty kappa/2 (1-J)^2 and a viscous pseudo-potential
// eta/2 tr(Edot^2). The neo-Hookean variant is c1 (I1bar - 3) with the same
// volumetric penalty.
struct Material {
  MaterialKind kind = MaterialKind::HolzapfelOgden;
  double rho0 = 1e3;  // reference density [kg/m^3]

  // Holzapfel-Ogden moduli [Pa] and exponents [-]
  double a = 59.0, b = 8.023;
  double a_f = 18.472e3, b_f = 16.026;
  double a_s = 2.481e3, b_s = 11.12;
  double a_fs = 216.0, b_fs = 11.436;
  double heaviside_k = 100.0;  // gate steepness

  double c1 = 0.0;  // neo-Hookean modulus [Pa]

  double kappa = 1e6;  // volumetric penalty [Pa]
  double eta = 0.0;    // viscosity [Pa s]

  void validate() const;
};

// Smoothed Heaviside gate centered at x = 1; chi(1) = 1/2, strictly
// increasing, range (0,1).
double heaviside_gate(double x, double k);

struct StressResult {
  Mat3 S;        // total second Piola-Kirchhoff stress (elastic+viscous+active)
  Mat66 dS_dE;   // elastic tangent in Voigt form (engineering shear strain)
};

// Voigt packing, order 11 22 33 23 13 12. Stress-like quantities use plain
// components, strain-like increments carry doubled shear entries so that
// dS_voigt = dS_dE * strain_voigt(dE).
Vec6 stress_voigt(const Mat3& t);
Vec6 strain_voigt(const Mat3& e);
Mat3 from_stress_voigt(const Vec6& v);

// S(C, Edot) for the given material with fiber/sheet directions f0, s0 (unit,
// reference configuration) and active fiber tension tau. The tangent covers
// the elastic part only; the viscous contribution is eta * dEdot and the
// active term is constant in E. Requires det(C) > 0.
StressResult pk2_stress(const Material& mat, const Vec3& f0, const Vec3& s0,
                        const Mat3& C, const Mat3& Edot, double tau);

}  // namespace hemofem::fem
