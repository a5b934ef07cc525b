#include <doctest.h>

#include "fixtures.hpp"
#include "hemofem/lpn.hpp"
#include "hemofem/units.hpp"

#include <cmath>
#include <random>

using namespace hemofem;
using namespace hemofem::lpn;
using hemofem::units::mmHg_to_Pa;

TEST_CASE("valve resistance midpoint and saturation") {
  const double rmin = 1e6, rmax = 1e9, kp = 1e-3;
  CHECK(valve_resistance(0.0, rmin, rmax, kp) == doctest::Approx(0.5 * (rmin + rmax)));
  CHECK(std::abs(valve_resistance(50.0 * kp, rmin, rmax, kp) - rmax) <=
        1e-20 * (rmax - rmin));
  CHECK(std::abs(valve_resistance(-50.0 * kp, rmin, rmax, kp) - rmin) <=
        1e-20 * (rmax - rmin));
}

TEST_CASE("valve resistance monotone and bounded") {
  const double rmin = 1e6, rmax = 1e9, kp = 1e-3;
  double prev = -1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double dp = -1e4 + i * 10.0;
    const double r = valve_resistance(dp, rmin, rmax, kp);
    CHECK(r >= rmin);
    CHECK(r <= rmax);
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("atrial pressure waveform") {
  const double p0 = mmHg_to_Pa(6.0), dp = mmHg_to_Pa(8.0);
  const double t_sys = 0.0, T_sys = 0.2;
  CHECK(atrial_pressure(t_sys, p0, dp, t_sys, T_sys) == doctest::Approx(p0));
  CHECK(atrial_pressure(t_sys + 0.5 * T_sys, p0, dp, t_sys, T_sys) ==
        doctest::Approx(mmHg_to_Pa(14.0)));
  CHECK(atrial_pressure(t_sys + 0.5, p0, dp, t_sys, T_sys) == doctest::Approx(p0));
  // periodic extension repeats the pulse every cycle
  CHECK(atrial_pressure(1.0 + 0.5 * T_sys, p0, dp, t_sys, T_sys, 1.0) ==
        doctest::Approx(mmHg_to_Pa(14.0)));
  CHECK(atrial_pressure(2.7, p0, dp, t_sys, T_sys, 1.0) == doctest::Approx(p0));
}

TEST_CASE("rk4 3/8 rule on exponential decay") {
  // RC with R = C = 1 gives dp/dt = -p. Expected first-step value evaluated
  // on the tableau by hand; exact solution e^{-0.1} for the error check.
  auto model = LpnModel::build(test::rc_decay_netlist(1.0, 1.0, 1.0));
  REQUIRE(model.dim_y() == 1);
  REQUIRE(model.dim_z() == 0);
  auto s0 = model.initial_state();
  auto s1 = rk4_step(model, s0, LpnForcing::none(), 0.1);
  CHECK(s1.w[0] == doctest::Approx(0.9048375).epsilon(1e-12));
  CHECK(std::abs(s1.w[0] - std::exp(-0.1)) < 1e-7);
}

TEST_CASE("rk4 exact for constant and zero rates") {
  // dp/dt = 0: isolated capacitor node holds its value bitwise.
  {
    lpn::Netlist net;
    net.nodes = {"n", "ref"};
    net.ground = "ref";
    Element cap;
    cap.name = "c";
    cap.kind = ElementKind::Capacitor;
    cap.node_a = "n";
    cap.node_b = "ref";
    cap.capacitance = 2.0;
    net.elements.push_back(cap);
    net.initial_pressures["n"] = 0.7;
    auto model = LpnModel::build(net);
    auto s = model.initial_state();
    for (int i = 0; i < 10; ++i) s = rk4_step(model, s, LpnForcing::none(), 0.25);
    CHECK(s.w[0] == 0.7);
  }
  // dp/dt = c via a constant prescribed inflow; exact for dyadic values.
  {
    lpn::Netlist net = test::rc_decay_netlist(1.0, 1.0, 0.0);
    net.elements.erase(net.elements.begin());  // drop the resistor
    net.flow_forcings["n"] = Waveform::constant(0.125);
    auto model = LpnModel::build(net);
    auto s = model.initial_state();
    for (int i = 0; i < 8; ++i) s = rk4_step(model, s, LpnForcing::none(), 0.5);
    CHECK(s.w[0] == 0.125 * 0.5 * 8);
  }
}

TEST_CASE("rk4 integrates cubic forcing exactly") {
  lpn::Netlist net;
  net.nodes = {"n", "ref"};
  net.ground = "ref";
  Element cap;
  cap.name = "c";
  cap.kind = ElementKind::Capacitor;
  cap.node_a = "n";
  cap.node_b = "ref";
  cap.capacitance = 1.0;
  net.elements.push_back(cap);
  net.flow_forcings["n"] = Waveform::polynomial({0.3, -1.2, 2.0, 4.0});
  auto model = LpnModel::build(net);
  auto s = model.initial_state();
  const double dt = 0.2;
  for (int i = 0; i < 5; ++i) s = rk4_step(model, s, LpnForcing::none(), dt);
  const double t = s.t;
  const double exact = 0.3 * t - 1.2 * t * t / 2 + 2.0 * t * t * t / 3 + t * t * t * t;
  CHECK(s.w[0] == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("rk4 global convergence order is 4") {
  auto model = LpnModel::build(test::rc_decay_netlist(1.0, 1.0, 1.0));
  std::vector<double> dts = {0.1, 0.05, 0.025, 0.0125};
  std::vector<double> errs;
  for (double dt : dts) {
    auto s = model.initial_state();
    const int n = static_cast<int>(std::round(1.0 / dt));
    for (int i = 0; i < n; ++i) s = rk4_step(model, s, LpnForcing::none(), dt);
    errs.push_back(std::abs(s.w[0] - std::exp(-1.0)));
  }
  // least-squares slope of log(err) vs log(dt)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const double x = std::log(dts[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(dts.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(4.0).epsilon(0.05));
}

namespace {

// Independent evaluation of the open-loop model equations, written directly
// from the four nodal equations rather than through the netlist machinery.
struct OpenLoopOracle {
  double rmin = 1e6, rmax = 1e9, kp = 1e-3;
  double lp = 1.3e5, rp = 7.3e6, cp = 7.7e-9, cd = 8.7e-9, rd = 1.0e8;
  double pref = 0.0;

  double p_at(double t) const {
    return atrial_pressure(t, mmHg_to_Pa(6.0), mmHg_to_Pa(8.0), 0.0, 0.2, 1.0);
  }
  double r_av(double pv, double t) const {
    return valve_resistance(pv - p_at(t), rmin, rmax, kp);
  }
  double r_sl(double pv, double pp) const {
    return valve_resistance(pp - pv, rmin, rmax, kp);
  }
  // dy/dt for y = [p_p, p_d, q_p] given the algebraic p_v
  Eigen::Vector3d rates(double pv, double pp, double pd, double qp) const {
    Eigen::Vector3d dy;
    dy[0] = ((pv - pp) / r_sl(pv, pp) - qp) / cp;
    dy[1] = (qp - (pd - pref) / rd) / cd;
    dy[2] = (pp - pd - rp * qp) / lp;
    return dy;
  }
  double g(double pv, double pp, double t, double q1) const {
    return (pv - p_at(t)) / r_av(pv, t) + (pv - pp) / r_sl(pv, pp) - q1;
  }
  double solve_pv(double pp, double t, double q1) const {
    double lo = -1e6, hi = 1e6;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (g(mid, pp, t, q1) > 0)
        hi = mid;
      else
        lo = mid;
    }
    return 0.5 * (lo + hi);
  }
};

}  // namespace

TEST_CASE("open-loop netlist reproduces the four nodal equations") {
  auto net = test::open_loop_netlist();
  auto model = LpnModel::build(net);
  REQUIRE(model.dim_w() == 4);
  CHECK(model.dim_y() == 3);
  CHECK(model.dim_z() == 1);
  CHECK(model.unknown_names() ==
        std::vector<std::string>{"ventricle", "proximal", "distal", "q_lp"});
  CHECK(model.alg_index() == std::vector<int>{0});

  OpenLoopOracle oracle;
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> pr(-2e3, 2e4), qr(-2e-4, 2e-4), tr(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vec w(4);
    w << pr(rng), pr(rng), pr(rng), qr(rng);
    const double t = tr(rng);
    const double q1 = qr(rng);
    auto forcing = LpnForcing::steady(Vec::Constant(1, q1));

    const Vec dy = model.f(w, t, forcing);
    const Eigen::Vector3d ref = oracle.rates(w[0], w[1], w[2], w[3]);
    for (int i = 0; i < 3; ++i)
      CHECK(dy[i] == doctest::Approx(ref[i]).epsilon(1e-12));

    const Vec gv = model.g(w, t, forcing, nullptr);
    CHECK(gv[0] == doctest::Approx(oracle.g(w[0], w[1], t, q1)).epsilon(1e-12));
  }
}

TEST_CASE("algebraic solve matches bisection oracle across valve transition") {
  auto model = LpnModel::build(test::open_loop_netlist());
  OpenLoopOracle oracle;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> pr(0.0, 2e4), qr(-2e-4, 2e-4);
  for (int trial = 0; trial < 30; ++trial) {
    Vec w(4);
    w << 0.0, pr(rng), pr(rng), qr(rng);
    const double t = 0.05;
    const double q1 = qr(rng);
    auto forcing = LpnForcing::steady(Vec::Constant(1, q1));
    const Vec z = model.solve_algebraic(w, t, forcing);
    const double ref = oracle.solve_pv(w[1], t, q1);
    CHECK(z[0] == doctest::Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("initial state projects algebraic variables onto g = 0") {
  auto model = LpnModel::build(test::open_loop_netlist());
  auto forcing = LpnForcing::steady(Vec::Zero(1));
  auto s0 = model.initial_state(0.0, forcing);
  Vec g = model.g(s0.w, 0.0, forcing, nullptr);
  CHECK(std::abs(g[0]) < 1e-12);
  // differential initial values are kept verbatim
  CHECK(s0.w[1] == doctest::Approx(mmHg_to_Pa(61.8)));
  CHECK(s0.w[2] == doctest::Approx(mmHg_to_Pa(59.7)));
  CHECK(s0.w[3] == doctest::Approx(38.3e-6));
}

TEST_CASE("fixed point operator ignores the guess bitwise") {
  auto model = LpnModel::build(test::open_loop_netlist());
  auto s0 = model.initial_state(0.0, LpnForcing::steady(Vec::Zero(1)));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> pr(-1e4, 1e4);
  for (int trial = 0; trial < 100; ++trial) {
    Vec ga(4), gb(4);
    for (int i = 0; i < 4; ++i) {
      ga[i] = pr(rng);
      gb[i] = pr(rng);
    }
    Vec q1 = Vec::Constant(1, pr(rng) * 1e-8);
    Vec q0 = Vec::Constant(1, pr(rng) * 1e-8);
    const Vec wa = fixed_point_operator(model, ga, q1, s0, q0, 1e-3);
    const Vec wb = fixed_point_operator(model, gb, q1, s0, q0, 1e-3);
    REQUIRE(wa.size() == wb.size());
    for (int i = 0; i < wa.size(); ++i) {
      CHECK(std::memcmp(&wa[i], &wb[i], sizeof(double)) == 0);
    }
  }
}

TEST_CASE("constant current netlist gives p = p_high + Q R") {
  const double p_high = 1.0e5, r_high = 5.0e17;
  auto model = LpnModel::build(test::constant_current_netlist(p_high, r_high));
  REQUIRE(model.dim_w() == 1);
  REQUIRE(model.dim_z() == 1);
  auto s0 = model.initial_state(0.0, LpnForcing::steady(Vec::Zero(1)));
  const double q1 = -2.0e-13;
  const Vec wt = fixed_point_operator(model, s0.w, Vec::Constant(1, q1), s0,
                                      Vec::Constant(1, q1), 1e-3);
  CHECK(wt[0] == doctest::Approx(p_high + q1 * r_high).epsilon(1e-12));
}

TEST_CASE("fixed point operator matches rk4 on autonomous RC decay") {
  const double r = 2.0e4, c = 1.0e-5;  // RC = 0.2 s
  auto model = LpnModel::build(test::rc_decay_netlist(r, c, 100.0));
  auto s0 = model.initial_state();
  const double dt = 1e-3 * r * c;
  Vec w = s0.w;
  LpnState s = s0;
  for (int i = 0; i < 100; ++i) {
    w = fixed_point_operator(model, w, Vec(), s, Vec(), dt);
    s = rk4_step(model, s, LpnForcing::none(), dt);
    CHECK(w[0] == s.w[0]);
  }
  const double exact = 100.0 * std::exp(-s.t / (r * c));
  CHECK(s.w[0] == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("coupled forcing interpolation hits both endpoints exactly") {
  LpnForcing f;
  f.Q_n = Vec::Constant(2, 0.3);
  f.Q_np1 = Vec::Constant(2, -0.7);
  f.Q_n[1] = 1.9;
  f.Q_np1[1] = 2.7;
  f.t_n = 0.4;
  f.dt = 0.125;
  CHECK(f.coupled_at(0.4)[0] == 0.3);
  CHECK(f.coupled_at(0.4)[1] == 1.9);
  CHECK(f.coupled_at(0.4 + 0.125)[0] == -0.7);
  CHECK(f.coupled_at(0.4 + 0.125)[1] == 2.7);
  CHECK(f.coupled_at(0.4 + 0.0625)[1] == doctest::Approx(2.3));
}

TEST_CASE("pressure selector picks components") {
  Vec w(5);
  w << 10, 20, 30, 40, 50;
  PressureSelector sel({1, 3}, 5);  // second and fourth components
  const Vec p = project_pressures(sel, w);
  REQUIRE(p.size() == 2);
  CHECK(p[0] == 20);
  CHECK(p[1] == 40);
  PressureSelector one({2}, 5);
  CHECK(project_pressures(one, w)[0] == 30);
  CHECK(project_pressures(one, Vec::Zero(5))[0] == 0.0);
}

TEST_CASE("kirchhoff balance on a driven resistor ring") {
  lpn::Netlist net;
  net.nodes = {"a", "b", "c", "ref"};
  net.ground = "ref";
  auto res = [&](const char* name, const char* na, const char* nb, double r) {
    Element e;
    e.name = name;
    e.kind = ElementKind::Resistor;
    e.node_a = na;
    e.node_b = nb;
    e.resistance = r;
    net.elements.push_back(e);
  };
  res("r1", "a", "b", 1e6);
  res("r2", "b", "c", 2e6);
  res("r3", "c", "a", 3e6);
  res("r4", "b", "ref", 4e6);
  SUBCASE("undriven loop settles to zero flow") {
    auto model = LpnModel::build(net);
    auto s = model.initial_state();
    Vec scale;
    Vec g = model.g(s.w, 0.0, LpnForcing::none(), &scale);
    for (int i = 0; i < g.size(); ++i) CHECK(std::abs(g[i]) <= 1e-10 * std::max(scale[i], 1e-30));
    CHECK(s.w.cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("driven ring satisfies nodal balance to solver tolerance") {
    net.flow_forcings["a"] = Waveform::constant(2.5e-5);
    auto model = LpnModel::build(net);
    auto s = model.initial_state();
    Vec scale;
    Vec g = model.g(s.w, 0.0, LpnForcing::none(), &scale);
    for (int i = 0; i < g.size(); ++i)
      CHECK(std::abs(g[i]) <= 1e-10 * std::max(scale[i], 1e-30));
  }
}

TEST_CASE("structural singularities are reported with the offending node") {
  SUBCASE("pressure undetermined by resistive or capacitive paths") {
    lpn::Netlist net;
    net.nodes = {"a", "b", "ref"};
    net.ground = "ref";
    Element l;
    l.name = "l";
    l.kind = ElementKind::Inductor;
    l.node_a = "a";
    l.node_b = "b";
    l.inductance = 1.0;
    net.elements.push_back(l);
    Element r;
    r.name = "r";
    r.kind = ElementKind::Resistor;
    r.node_a = "b";
    r.node_b = "ref";
    r.resistance = 1.0;
    net.elements.push_back(r);
    CHECK_THROWS_WITH_AS(LpnModel::build(net),
                         doctest::Contains("structural singularity at node 'a'"),
                         ConfigError);
  }
  SUBCASE("floating capacitor pair") {
    lpn::Netlist net;
    net.nodes = {"a", "b", "ref"};
    net.ground = "ref";
    Element c;
    c.name = "c";
    c.kind = ElementKind::Capacitor;
    c.node_a = "a";
    c.node_b = "b";
    c.capacitance = 1.0;
    net.elements.push_back(c);
    Element r;
    r.name = "r";
    r.kind = ElementKind::Resistor;
    r.node_a = "b";
    r.node_b = "ref";
    r.resistance = 1.0;
    net.elements.push_back(r);
    CHECK_THROWS_AS(LpnModel::build(net), ConfigError);
  }
}

TEST_CASE("netlist validation rejects bad input") {
  auto net = test::open_loop_netlist();
  net.elements[0].r_min = 0.0;
  CHECK_THROWS_AS(LpnModel::build(net), ConfigError);

  auto net2 = test::open_loop_netlist();
  net2.coupled_nodes.push_back("ventricle");
  CHECK_THROWS_AS(net2.validate(), ConfigError);

  auto net3 = test::open_loop_netlist();
  net3.elements[2].node_b = "nowhere";
  CHECK_THROWS_AS(net3.validate(), ConfigError);
}

TEST_CASE("unit helpers") {
  CHECK(units::parse_quantity("8 mmHg") == doctest::Approx(8 * 133.322));
  CHECK(units::parse_quantity("38.3 mL/s") == doctest::Approx(38.3e-6));
  CHECK(units::parse_quantity("1e6") == 1e6);
  CHECK(units::mmHg_to_Pa(1.0) == 133.322);
  CHECK(units::ml_to_m3(1.0) == 1e-6);
  CHECK_THROWS_AS(units::parse_quantity("3 furlongs"), ConfigError);
}
