#pragma once

#include "hemofem/common.hpp"
#include "hemofem/netlist.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace hemofem::lpn {

// Overflow-safe logistic function.
template <typename Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

// Smooth diode resistance. dp is the reverse-bias pressure difference:
// dp << 0 fully open (R_min), dp >> 0 fully closed (R_max). Monotone
// nondecreasing in dp and bounded in [R_min, R_max].
template <typename Scalar>
Scalar valve_resistance(Scalar dp, Scalar r_min, Scalar r_max, Scalar k_p) {
  return r_min + (r_max - r_min) * sigmoid(dp / k_p);
}

template <typename Scalar>
Scalar valve_resistance_derivative(Scalar dp, Scalar r_min, Scalar r_max, Scalar k_p) {
  const Scalar s = sigmoid(dp / k_p);
  return (r_max - r_min) * s * (Scalar(1) - s) / k_p;
}

// Combined 0D state. w keeps the netlist declaration order (node pressures,
// then inductor branch flows); the differential/algebraic split is described
// by the model's index sets, so w gathers y and z without reordering.
struct LpnState {
  Vec w;
  double t = 0.0;
};

// Coupled Dirichlet forcing over one step: flows at the coupled nodes vary
// linearly between Q_n at t_n and Q_np1 at t_n + dt. Prescribed (uncoupled)
// forcings are waveforms owned by the model itself.
struct LpnForcing {
  Vec Q_n;
  Vec Q_np1;
  double t_n = 0.0;
  double dt = 0.0;

  static LpnForcing none() { return LpnForcing{Vec(), Vec(), 0.0, 0.0}; }
  static LpnForcing steady(const Vec& q) { return LpnForcing{q, q, 0.0, 0.0}; }

  // Linear-in-time interpolation; exact at both endpoints.
  Vec coupled_at(double t) const {
    if (Q_n.size() == 0) return Q_n;
    if (dt <= 0.0) return Q_n;
    const double s = (t - t_n) / dt;
    return Q_n + s * (Q_np1 - Q_n);
  }
};

// Sparse 0/1 selection: row i picks the w component holding the pressure at
// coupled node i.
class PressureSelector {
 public:
  PressureSelector() = default;
  explicit PressureSelector(std::vector<int> rows, int dim_w)
      : rows_(std::move(rows)), dim_w_(dim_w) {}

  int n_rows() const { return static_cast<int>(rows_.size()); }
  int dim_w() const { return dim_w_; }
  int component(int i) const { return rows_.at(static_cast<std::size_t>(i)); }

  Vec apply(const Vec& w) const {
    if (w.size() != dim_w_) throw CouplingError("pressure selector dimension mismatch");
    Vec p(n_rows());
    for (int i = 0; i < n_rows(); ++i) p[i] = w[rows_[static_cast<std::size_t>(i)]];
    return p;
  }

 private:
  std::vector<int> rows_;
  int dim_w_ = 0;
};

inline Vec project_pressures(const PressureSelector& selector, const Vec& w) {
  return selector.apply(w);
}

struct AlgebraicSolveOptions {
  double tol = 1e-12;  // on the per-equation scaled residual
  int max_iters = 50;
  int max_halvings = 30;
};

struct RkOptions {
  // Appendix-style literal scheme holds z at z_n inside the stages; this
  // re-solves the algebraic subsystem at every stage instead.
  bool resolve_z_per_stage = false;
};

// Nodal-analysis DAE built from a netlist. Unknowns are the pressures of all
// nodes that carry no prescribed pressure, plus one branch flow per inductor.
// A node with attached capacitance is differential, a resistor-only node is
// algebraic, and inductor flows are differential.
class LpnModel {
 public:
  static LpnModel build(const Netlist& netlist);

  int dim_w() const { return dim_w_; }
  int dim_y() const { return static_cast<int>(diff_index_.size()); }
  int dim_z() const { return static_cast<int>(alg_index_.size()); }
  int n_coupled() const { return selector_.n_rows(); }

  const std::vector<int>& diff_index() const { return diff_index_; }
  const std::vector<int>& alg_index() const { return alg_index_; }
  const std::vector<std::string>& unknown_names() const { return unknown_names_; }
  const PressureSelector& selector() const { return selector_; }
  AlgebraicSolveOptions& algebraic_options() { return alg_opts_; }

  int unknown_index(const std::string& name) const;

  // dy/dt at the given combined state (z entries of w are used as-is).
  Vec f(const Vec& w, double t, const LpnForcing& forcing) const;
  // Algebraic residuals g (one per algebraic node), and their scales.
  Vec g(const Vec& w, double t, const LpnForcing& forcing, Vec* scale = nullptr) const;
  // Solves g = 0 for z at fixed y (damped Newton, analytic Jacobian).
  // w supplies both the fixed y entries and the starting guess for z.
  Vec solve_algebraic(const Vec& w, double t, const LpnForcing& forcing) const;

  Vec pack_y(const Vec& w) const { return gather(w, diff_index_); }
  Vec pack_z(const Vec& w) const { return gather(w, alg_index_); }
  Vec combine(const Vec& y, const Vec& z) const;

  // Initial combined state from the netlist initial values; the algebraic
  // part is projected onto g = 0 at t0 (adjustment logged if significant).
  LpnState initial_state(double t0 = 0.0, const LpnForcing& forcing = LpnForcing::none()) const;

 private:
  struct EndRef {
    int w_index = -1;    // >= 0: unknown slot in w
    int forced = -1;     // >= 0: prescribed-pressure waveform slot
  };
  struct Branch {
    ElementKind kind;
    EndRef a, b;
    double resistance = 0.0;
    double capacitance = 0.0;
    double inductance = 0.0;
    double series_resistance = 0.0;
    double r_min = 0.0, r_max = 0.0, k_p = 0.0;
    int flow_index = -1;  // inductor: w slot of the branch flow
    std::string name;
  };

  double pressure_at(const EndRef& e, const Vec& w, double t) const;
  // Flow a->b and its derivatives with respect to the endpoint pressures.
  double branch_flow(const Branch& br, const Vec& w, double t,
                     double* di_dpa = nullptr) const;
  Vec inflow(double t, const LpnForcing& forcing) const;  // q_in per unknown node

  static Vec gather(const Vec& w, const std::vector<int>& idx);

  // layout
  int dim_w_ = 0;
  int n_unknown_nodes_ = 0;
  std::vector<std::string> unknown_names_;
  std::vector<int> diff_index_, alg_index_;
  std::vector<int> node_alg_row_;   // unknown node -> row in g (or -1)
  std::vector<int> node_diff_row_;  // unknown node -> row in capacitance system (or -1)
  std::vector<Branch> branches_;
  std::vector<Waveform> forced_waveforms_;
  std::vector<std::string> forced_names_;

  // per unknown node: optional prescribed inflow / coupled index
  std::vector<int> node_flow_forcing_;  // slot into flow_waveforms_ or -1
  std::vector<int> node_coupled_;       // coupled index or -1
  std::vector<Waveform> flow_waveforms_;

  // capacitance system over differential node rows
  Eigen::MatrixXd cap_matrix_;
  Eigen::PartialPivLU<Eigen::MatrixXd> cap_lu_;
  struct ForcedCap {
    int diff_row;
    int forced;
    double c;  // signed: +C * d/dt p_forced enters the rhs
  };
  std::vector<ForcedCap> forced_caps_;

  Vec initial_w_;
  PressureSelector selector_;
  AlgebraicSolveOptions alg_opts_;
};

// One explicit 3/8-rule step of the DAE: RK4 on the differential variables
// with z held at z_n inside the stages, then the algebraic solve at t_n + dt.
LpnState rk4_step(const LpnModel& model, const LpnState& state_n,
                  const LpnForcing& forcing, double dt, const RkOptions& opts = {});

// Fixed-point operator of the 0D time integrator: one application yields the
// solution of the step-(n+1) system for the given coupled flows. The scheme
// is explicit, so the result does not depend on w_guess (asserted by tests).
Vec fixed_point_operator(const LpnModel& model, const Vec& w_guess, const Vec& Q_np1,
                         const LpnState& state_n, const Vec& Q_n, double dt,
                         const RkOptions& opts = {});

}  // namespace hemofem::lpn
