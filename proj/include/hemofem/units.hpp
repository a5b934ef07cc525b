#pragma once

#include <string>

namespace hemofem::units {

// Exact conversion constants. Internally everything is strict SI
// (Pa, m^3, m^3/s, s); these are applied once on ingest.
inline constexpr double kPaPerMmHg = 133.322;
inline constexpr double kM3PerMl = 1.0e-6;

inline double mmHg_to_Pa(double p) { return p * kPaPerMmHg; }
inline double Pa_to_mmHg(double p) { return p / kPaPerMmHg; }
inline double ml_to_m3(double v) { return v * kM3PerMl; }
inline double m3_to_ml(double v) { return v / kM3PerMl; }

// Parses "8 mmHg", "38.3 mL/s", "1e6 Pa", "0.2 s", ... into SI.
// A bare number string is taken as already-SI. Throws ConfigError on an
// unknown unit token.
double parse_quantity(const std::string& text);

}  // namespace hemofem::units
