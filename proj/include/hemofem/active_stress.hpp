#pragma once

#include <cmath>

namespace hemofem::fem {

// Fiber active-stress driver. The activation rate a(t) blends between the
// deactivation rate alpha_min and the activation rate alpha_max through a
// smoothed indicator of the systolic window [t_sys, t_dias] (phase within one
// cardiac cycle), and the fiber tension follows
//     d(tau)/dt = -|a(t)| tau + sigma0 * max(a(t), 0),
// so tau rises toward sigma0 during systole and decays to zero afterwards.
struct ActiveStressModel {
  double sigma0 = 0.0;      // contractility [Pa]
  double alpha_max = 5.0;   // activation rate [1/s]
  double alpha_min = -30.0; // deactivation rate [1/s]
  double t_sys = 0.143;     // ventricular systole onset [s]
  double t_dias = 0.484;    // ventricular diastole onset [s]
  double steepness = 0.005; // indicator transition width [s]
  double period = 1.0;      // cardiac cycle duration [s]

  double rate(double t) const {
    double phase = t;
    if (period > 0.0) {
      phase = std::fmod(t, period);
      if (phase < 0.0) phase += period;
    }
    auto logistic = [](double x) {
      if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
      const double e = std::exp(x);
      return e / (1.0 + e);
    };
    const double ind = logistic((phase - t_sys) / steepness) *
                       logistic((t_dias - phase) / steepness);
    return alpha_min + (alpha_max - alpha_min) * ind;
  }

  double tau_rate(double t, double tau) const {
    const double a = rate(t);
    return -std::abs(a) * tau + sigma0 * std::max(a, 0.0);
  }

  // One 3/8-rule step of the tension ODE (same tableau as the 0D solver).
  double advance(double tau, double t, double dt) const;

  // Integrates tau from 0 to t starting at tau(0) = 0.
  double tau_at(double t, double dt = 1e-3) const;
};

}  // namespace hemofem::fem
