#include "hemofem/netlist.hpp"

#include "hemofem/common.hpp"

#include <algorithm>
#include <set>

namespace hemofem::lpn {

bool Netlist::has_node(const std::string& name) const {
  return std::find(nodes.begin(), nodes.end(), name) != nodes.end();
}

void Netlist::validate() const {
  if (nodes.empty()) throw ConfigError("netlist has no nodes");
  {
    std::set<std::string> seen;
    for (const auto& n : nodes)
      if (!seen.insert(n).second) throw ConfigError("duplicate node '" + n + "'");
  }
  if (!ground.empty() && !has_node(ground))
    throw ConfigError("ground node '" + ground + "' is not declared");

  std::set<std::string> elem_names;
  for (const auto& e : elements) {
    if (!e.name.empty() && !elem_names.insert(e.name).second)
      throw ConfigError("duplicate element name '" + e.name + "'");
    if (!has_node(e.node_a) || !has_node(e.node_b))
      throw ConfigError("element '" + e.name + "' references undeclared node");
    switch (e.kind) {
      case ElementKind::Resistor:
        if (e.resistance <= 0.0)
          throw ConfigError("resistor '" + e.name + "' must have R > 0");
        break;
      case ElementKind::Capacitor:
        if (e.capacitance <= 0.0)
          throw ConfigError("capacitor '" + e.name + "' must have C > 0");
        break;
      case ElementKind::Inductor:
        if (e.inductance <= 0.0)
          throw ConfigError("inductor '" + e.name + "' must have L > 0");
        if (e.series_resistance < 0.0)
          throw ConfigError("inductor '" + e.name + "' series resistance < 0");
        break;
      case ElementKind::Valve:
        if (!(e.r_min > 0.0 && e.r_max >= e.r_min && e.k_p > 0.0))
          throw ConfigError("valve '" + e.name +
                            "' requires R_max >= R_min > 0 and k_p > 0");
        break;
    }
  }

  std::set<std::string> coupled_seen;
  for (const auto& n : coupled_nodes) {
    if (!has_node(n)) throw ConfigError("coupled node '" + n + "' is not declared");
    if (!coupled_seen.insert(n).second)
      throw ConfigError("coupled node '" + n + "' listed more than once");
    if (pressure_forcings.count(n) || n == ground)
      throw ConfigError("coupled node '" + n + "' cannot carry a prescribed pressure");
  }
  for (const auto& [n, w] : pressure_forcings) {
    (void)w;
    if (!has_node(n))
      throw ConfigError("pressure forcing on undeclared node '" + n + "'");
  }
  for (const auto& [n, w] : flow_forcings) {
    (void)w;
    if (!has_node(n))
      throw ConfigError("flow forcing on undeclared node '" + n + "'");
    if (pressure_forcings.count(n) || n == ground)
      throw ConfigError("flow forcing on pressure-forced node '" + n + "'");
  }
}

}  // namespace hemofem::lpn
