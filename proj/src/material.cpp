#include "hemofem/material.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>

namespace hemofem::fem {

void Material::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (v < 0.0) throw ConfigError(std::string("material modulus ") + name + " < 0");
  };
  nonneg(a, "a");
  nonneg(a_f, "a_f");
  nonneg(a_s, "a_s");
  nonneg(a_fs, "a_fs");
  nonneg(c1, "c1");
  nonneg(eta, "eta");
  if (kappa <= 0.0) throw ConfigError("volumetric penalty kappa must be > 0");
  if (rho0 < 0.0) throw ConfigError("density rho0 < 0");
}

namespace {

std::atomic<long> g_overflow_clamps{0};

// exp with the argument clamped at 300; anything larger is out of the
// physical range and would overflow downstream products.
double safe_exp(double x) {
  if (x > 300.0) {
    if (g_overflow_clamps.fetch_add(1) == 0)
      std::fprintf(stderr, "[material] exponential argument %.3g clamped to 300\n", x);
    x = 300.0;
  }
  return std::exp(x);
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

constexpr int kVi[6] = {0, 1, 2, 1, 0, 0};
constexpr int kVj[6] = {0, 1, 2, 2, 2, 1};

// 6x6 representation of the symmetrized product 1/2 (Y_ik Y_jl + Y_il Y_jk),
// consistent with engineering-shear strain columns.
Mat66 sym_outer_voigt(const Mat3& y) {
  Mat66 out;
  for (int p = 0; p < 6; ++p) {
    const int i = kVi[p], j = kVj[p];
    for (int q = 0; q < 6; ++q) {
      const int k = kVi[q], l = kVj[q];
      out(p, q) = 0.5 * (y(i, k) * y(j, l) + y(i, l) * y(j, k));
    }
  }
  return out;
}

}  // namespace

double heaviside_gate(double x, double k) { return logistic(k * (x - 1.0)); }

Vec6 stress_voigt(const Mat3& t) {
  Vec6 v;
  v << t(0, 0), t(1, 1), t(2, 2), t(1, 2), t(0, 2), t(0, 1);
  return v;
}

Vec6 strain_voigt(const Mat3& e) {
  Vec6 v;
  v << e(0, 0), e(1, 1), e(2, 2), 2.0 * e(1, 2), 2.0 * e(0, 2), 2.0 * e(0, 1);
  return v;
}

Mat3 from_stress_voigt(const Vec6& v) {
  Mat3 t;
  t << v[0], v[5], v[4], v[5], v[1], v[3], v[4], v[3], v[2];
  return t;
}

StressResult pk2_stress(const Material& mat, const Vec3& f0, const Vec3& s0,
                        const Mat3& C, const Mat3& Edot, double tau) {
  const double detC = C.determinant();
  if (!(detC > 0.0)) throw SolveError("pk2_stress: det(C) <= 0");
  const double J = std::sqrt(detC);
  const Mat3 Cinv = C.inverse();
  const Mat3 I = Mat3::Identity();
  const double I1 = C.trace();
  const double J23 = std::pow(J, -2.0 / 3.0);

  // isochoric part shared by the HO matrix term and neo-Hookean
  const Mat3 G = J23 * (I - (I1 / 3.0) * Cinv);
  const Mat66 Kinv = sym_outer_voigt(Cinv);
  const Vec6 g_v = stress_voigt(G);
  const Vec6 cinv_v = stress_voigt(Cinv);
  const Vec6 i_v = stress_voigt(I);
  const Mat66 dGdC =
      -(1.0 / 3.0) * (g_v * cinv_v.transpose() + J23 * cinv_v * i_v.transpose()) +
      (J23 * I1 / 3.0) * Kinv;

  Mat3 S = Mat3::Zero();
  Mat66 CC = Mat66::Zero();

  if (mat.kind == MaterialKind::HolzapfelOgden) {
    const double e1 = safe_exp(mat.b * (J23 * I1 - 3.0));
    S += mat.a * e1 * G;
    CC += 2.0 * mat.a * e1 * (mat.b * (g_v * g_v.transpose()) + dGdC);

    // fiber and sheet families, gated by the smoothed Heaviside
    struct Family {
      Vec3 dir;
      double ai, bi;
    };
    const Family fams[2] = {{f0, mat.a_f, mat.b_f}, {s0, mat.a_s, mat.b_s}};
    for (const auto& fam : fams) {
      if (fam.ai == 0.0) continue;
      const Mat3 A = fam.dir * fam.dir.transpose();
      const double x = fam.dir.dot(C * fam.dir);
      const double chi = heaviside_gate(x, mat.heaviside_k);
      const double chi1 = mat.heaviside_k * chi * (1.0 - chi);
      const double chi2 = mat.heaviside_k * chi1 * (1.0 - 2.0 * chi);
      const double ex = safe_exp(fam.bi * (x - 1.0) * (x - 1.0));
      const double w = fam.ai / (2.0 * fam.bi) * (ex - 1.0);
      const double dw = fam.ai * (x - 1.0) * ex;
      const double ddw = fam.ai * ex * (1.0 + 2.0 * fam.bi * (x - 1.0) * (x - 1.0));
      const double dpsi = chi1 * w + chi * dw;
      const double ddpsi = chi2 * w + 2.0 * chi1 * dw + chi * ddw;
      const Vec6 a_v = stress_voigt(A);
      S += 2.0 * dpsi * A;
      CC += 4.0 * ddpsi * (a_v * a_v.transpose());
    }

    if (mat.a_fs != 0.0) {
      const Mat3 Afs = 0.5 * (f0 * s0.transpose() + s0 * f0.transpose());
      const double x8 = f0.dot(C * s0);
      const double ex = safe_exp(mat.b_fs * x8 * x8);
      const double h = mat.a_fs * x8 * ex;
      const double dh = mat.a_fs * ex * (1.0 + 2.0 * mat.b_fs * x8 * x8);
      const Vec6 afs_v = stress_voigt(Afs);
      S += 2.0 * h * Afs;
      CC += 4.0 * dh * (afs_v * afs_v.transpose());
    }
  } else {
    S += 2.0 * mat.c1 * G;
    CC += 4.0 * mat.c1 * dGdC;
  }

  // volumetric penalty kappa/2 (1-J)^2
  S += mat.kappa * J * (J - 1.0) * Cinv;
  CC += mat.kappa * (J * (2.0 * J - 1.0) * (cinv_v * cinv_v.transpose()) -
                     2.0 * J * (J - 1.0) * Kinv);

  // viscosity (rate term, not part of the elastic tangent) and active tension
  if (mat.eta != 0.0) S += mat.eta * Edot;
  if (tau != 0.0) S += tau * (f0 * f0.transpose());

  return {S, CC};
}

}  // namespace hemofem::fem
