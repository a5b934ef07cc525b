#include "hemofem/active_stress.hpp"

#include <algorithm>

namespace hemofem::fem {

double ActiveStressModel::advance(double tau, double t, double dt) const {
  const double k1 = tau_rate(t, tau);
  const double k2 = tau_rate(t + dt / 3.0, tau + k1 * dt / 3.0);
  const double k3 = tau_rate(t + 2.0 * dt / 3.0, tau - k1 * dt / 3.0 + k2 * dt);
  const double k4 = tau_rate(t + dt, tau + (k1 - k2 + k3) * dt);
  return tau + (k1 + 3.0 * k2 + 3.0 * k3 + k4) * dt / 8.0;
}

double ActiveStressModel::tau_at(double t, double dt) const {
  double tau = 0.0;
  double s = 0.0;
  while (s < t - 1e-15) {
    const double h = std::min(dt, t - s);
    tau = advance(tau, s, h);
    s += h;
  }
  return tau;
}

}  // namespace hemofem::fem
