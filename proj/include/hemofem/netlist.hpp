#pragma once

#include "hemofem/waveform.hpp"

#include <map>
#include <string>
#include <vector>

namespace hemofem::lpn {

enum class ElementKind { Resistor, Capacitor, Inductor, Valve };

// A two-terminal circuit element between pressure nodes a and b.
//   resistor:  flow a->b is (p_a - p_b)/R
//   capacitor: stores C d(p_a - p_b)/dt
//   inductor:  carries its own branch-flow unknown q (a->b) obeying
//              L dq/dt = p_a - p_b - R_series q
//   valve:     resistor whose R depends on the reverse-bias pressure
//              p_b - p_a through a sigmoid (diode, conducting a->b)
struct Element {
  std::string name;
  ElementKind kind = ElementKind::Resistor;
  std::string node_a, node_b;
  double resistance = 0.0;         // resistor [Pa*s/m^3]
  double capacitance = 0.0;        // capacitor [m^3/Pa]
  double inductance = 0.0;         // inductor [Pa*s^2/m^3]
  double series_resistance = 0.0;  // inductor branch series R
  double r_min = 0.0, r_max = 0.0, k_p = 0.0;  // valve
};

struct Netlist {
  std::vector<std::string> nodes;
  std::vector<Element> elements;

  // Designated reference node; its pressure is the forcing p_ref(t)
  // (constant 0 Pa unless a pressure forcing is declared for it).
  std::string ground;

  // Neumann set: prescribed pressures p(t) by node name.
  std::map<std::string, Waveform> pressure_forcings;
  // Uncoupled Dirichlet set: prescribed inflows q_u(t) by node name.
  std::map<std::string, Waveform> flow_forcings;
  // Coupled Dirichlet nodes, in coupled-index order (i -> node).
  std::vector<std::string> coupled_nodes;

  // Initial values; pressures keyed by node, flows keyed by inductor name.
  std::map<std::string, double> initial_pressures;
  std::map<std::string, double> initial_flows;

  bool has_node(const std::string& name) const;
  // Throws ConfigError on dangling references, duplicate coupled nodes,
  // bad valve parameters, or nonpositive element values.
  void validate() const;
};

}  // namespace hemofem::lpn
