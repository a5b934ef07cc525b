#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace hemofem {

// Piecewise-cosine atrial pressure pulse: baseline p0 outside the systolic
// window [t_sys, t_sys + T_sys), a raised-cosine bump of amplitude dp inside
// it, peaking at the window midpoint. If period > 0 the waveform repeats with
// that period (one bump per cardiac cycle).
template <typename Scalar>
Scalar atrial_pressure(Scalar t, Scalar p0, Scalar dp, Scalar t_sys, Scalar T_sys,
                       Scalar period = Scalar(0)) {
  Scalar tau = t - t_sys;
  if (period > Scalar(0)) {
    tau = std::fmod(tau, period);
    if (tau < Scalar(0)) tau += period;
  }
  if (tau > Scalar(0) && tau < T_sys) {
    const Scalar two_pi = Scalar(2) * Scalar(M_PI);
    return p0 + (dp / Scalar(2)) * (Scalar(1) - std::cos(two_pi * tau / T_sys));
  }
  return p0;
}

// Prescribed scalar function of time (boundary forcing). Built-ins are
// "constant", "atrial_cosine", and a tabulated curve with linear
// interpolation; tables clamp outside their range unless given a period.
class Waveform {
 public:
  Waveform() : kind_(Kind::Constant), c0_(0.0) {}

  static Waveform constant(double value) {
    Waveform w;
    w.kind_ = Kind::Constant;
    w.c0_ = value;
    return w;
  }

  static Waveform atrial_cosine(double p0, double dp, double t_sys, double T_sys,
                                double period = 0.0) {
    Waveform w;
    w.kind_ = Kind::AtrialCosine;
    w.c0_ = p0;
    w.c1_ = dp;
    w.c2_ = t_sys;
    w.c3_ = T_sys;
    w.period_ = period;
    return w;
  }

  // points must be sorted by time, strictly increasing.
  static Waveform table(std::vector<std::pair<double, double>> points,
                        double period = 0.0);

  // c[0] + c[1] t + c[2] t^2 + ...
  static Waveform polynomial(std::vector<double> coeffs) {
    Waveform w;
    w.kind_ = Kind::Polynomial;
    w.coeffs_ = std::move(coeffs);
    return w;
  }

  double operator()(double t) const;
  // Time derivative; used for capacitors attached to forced nodes.
  double derivative(double t) const;

 private:
  enum class Kind { Constant, AtrialCosine, Table, Polynomial };
  Kind kind_;
  double c0_ = 0, c1_ = 0, c2_ = 0, c3_ = 0;
  double period_ = 0.0;
  std::vector<std::pair<double, double>> points_;
  std::vector<double> coeffs_;

  double fold(double t) const;
};

}  // namespace hemofem
