#include "hemofem/units.hpp"

#include "hemofem/common.hpp"

#include <cstdlib>
#include <map>

namespace hemofem::units {

double parse_quantity(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (end == begin) throw ConfigError("cannot parse quantity '" + text + "'");
  std::string unit(end);
  // trim
  const auto a = unit.find_first_not_of(" \t");
  if (a == std::string::npos) return value;  // bare number, already SI
  const auto b = unit.find_last_not_of(" \t");
  unit = unit.substr(a, b - a + 1);

  static const std::map<std::string, double> factors = {
      {"Pa", 1.0},          {"kPa", 1.0e3},
      {"mmHg", kPaPerMmHg}, {"m3", 1.0},
      {"m^3", 1.0},         {"mL", kM3PerMl},
      {"ml", kM3PerMl},     {"L", 1.0e-3},
      {"m3/s", 1.0},        {"m^3/s", 1.0},
      {"mL/s", kM3PerMl},   {"ml/s", kM3PerMl},
      {"s", 1.0},           {"ms", 1.0e-3},
      {"m", 1.0},           {"mm", 1.0e-3},
      {"um", 1.0e-6},       {"cm", 1.0e-2},
  };
  const auto it = factors.find(unit);
  if (it == factors.end())
    throw ConfigError("unknown unit '" + unit + "' in quantity '" + text + "'");
  return value * it->second;
}

}  // namespace hemofem::units
