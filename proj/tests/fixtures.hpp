#pragma once

#include "hemofem/lpn.hpp"
#include "hemofem/netlist.hpp"
#include "hemofem/units.hpp"

namespace hemofem::test {

// Open-loop systemic circulation driven by an atrial pressure pulse: two
// diode valves around a coupled ventricle node, a proximal RLC group, and a
// distal RC to ground. Unknowns come out as w = [p_v, p_p, p_d, q_p].
inline lpn::Netlist open_loop_netlist() {
  using namespace hemofem::units;
  lpn::Netlist net;
  net.nodes = {"atrium", "ventricle", "proximal", "distal", "ref"};
  net.ground = "ref";
  net.pressure_forcings["atrium"] =
      Waveform::atrial_cosine(mmHg_to_Pa(6.0), mmHg_to_Pa(8.0), 0.0, 0.2, 1.0);

  lpn::Element av;
  av.name = "av";
  av.kind = lpn::ElementKind::Valve;
  av.node_a = "atrium";
  av.node_b = "ventricle";
  av.r_min = 1e6;
  av.r_max = 1e9;
  av.k_p = 1e-3;
  net.elements.push_back(av);

  lpn::Element sl = av;
  sl.name = "sl";
  sl.node_a = "ventricle";
  sl.node_b = "proximal";
  net.elements.push_back(sl);

  lpn::Element lp;
  lp.name = "lp";
  lp.kind = lpn::ElementKind::Inductor;
  lp.node_a = "proximal";
  lp.node_b = "distal";
  lp.inductance = 1.3e5;
  lp.series_resistance = 7.3e6;
  net.elements.push_back(lp);

  lpn::Element cp;
  cp.name = "cp";
  cp.kind = lpn::ElementKind::Capacitor;
  cp.node_a = "proximal";
  cp.node_b = "ref";
  cp.capacitance = 7.7e-9;
  net.elements.push_back(cp);

  lpn::Element cd = cp;
  cd.name = "cd";
  cd.node_a = "distal";
  cd.capacitance = 8.7e-9;
  net.elements.push_back(cd);

  lpn::Element rd;
  rd.name = "rd";
  rd.kind = lpn::ElementKind::Resistor;
  rd.node_a = "distal";
  rd.node_b = "ref";
  rd.resistance = 1.0e8;
  net.elements.push_back(rd);

  net.coupled_nodes = {"ventricle"};
  net.initial_pressures["ventricle"] = mmHg_to_Pa(8.0);
  net.initial_pressures["proximal"] = mmHg_to_Pa(61.8);
  net.initial_pressures["distal"] = mmHg_to_Pa(59.7);
  net.initial_flows["lp"] = ml_to_m3(38.3);
  return net;
}

// Constant-current source: a large pressure behind a large resistance feeding
// the coupled node, so p_in = p_high + Q1 * R_high.
inline lpn::Netlist constant_current_netlist(double p_high = 1.0e5,
                                             double r_high = 5.0e17) {
  lpn::Netlist net;
  net.nodes = {"source", "chamber"};
  net.ground = "source";
  net.pressure_forcings["source"] = Waveform::constant(p_high);
  lpn::Element r;
  r.name = "rhigh";
  r.kind = lpn::ElementKind::Resistor;
  r.node_a = "chamber";
  r.node_b = "source";
  r.resistance = r_high;
  net.elements.push_back(r);
  net.coupled_nodes = {"chamber"};
  return net;
}

// Single RC decay cell: d(p)/dt = -p / (R C).
inline lpn::Netlist rc_decay_netlist(double r, double c, double p0) {
  lpn::Netlist net;
  net.nodes = {"n", "ref"};
  net.ground = "ref";
  lpn::Element res;
  res.name = "r";
  res.kind = lpn::ElementKind::Resistor;
  res.node_a = "n";
  res.node_b = "ref";
  res.resistance = r;
  net.elements.push_back(res);
  lpn::Element cap;
  cap.name = "c";
  cap.kind = lpn::ElementKind::Capacitor;
  cap.node_a = "n";
  cap.node_b = "ref";
  cap.capacitance = c;
  net.elements.push_back(cap);
  net.initial_pressures["n"] = p0;
  return net;
}

}  // namespace hemofem::test
