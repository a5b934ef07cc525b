#include "hemofem/waveform.hpp"

#include "hemofem/common.hpp"

#include <algorithm>

namespace hemofem {

Waveform Waveform::table(std::vector<std::pair<double, double>> points,
                         double period) {
  if (points.empty()) throw ConfigError("tabulated waveform needs at least one point");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].first <= points[i - 1].first)
      throw ConfigError("tabulated waveform times must be strictly increasing");
  }
  Waveform w;
  w.kind_ = Kind::Table;
  w.points_ = std::move(points);
  w.period_ = period;
  return w;
}

double Waveform::fold(double t) const {
  if (period_ <= 0.0) return t;
  double ref = (kind_ == Kind::Table) ? points_.front().first : c2_;
  double tau = std::fmod(t - ref, period_);
  if (tau < 0.0) tau += period_;
  return ref + tau;
}

double Waveform::operator()(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return c0_;
    case Kind::AtrialCosine:
      return atrial_pressure(t, c0_, c1_, c2_, c3_, period_);
    case Kind::Table: {
      const double tt = fold(t);
      if (tt <= points_.front().first) return points_.front().second;
      if (tt >= points_.back().first) return points_.back().second;
      auto hi = std::upper_bound(points_.begin(), points_.end(), tt,
                                 [](double v, const auto& p) { return v < p.first; });
      auto lo = hi - 1;
      const double s = (tt - lo->first) / (hi->first - lo->first);
      return lo->second + s * (hi->second - lo->second);
    }
    case Kind::Polynomial: {
      double v = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * t + *it;
      return v;
    }
  }
  return 0.0;
}

double Waveform::derivative(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return 0.0;
    case Kind::AtrialCosine: {
      double tau = t - c2_;
      if (period_ > 0.0) {
        tau = std::fmod(tau, period_);
        if (tau < 0.0) tau += period_;
      }
      if (tau > 0.0 && tau < c3_) {
        const double two_pi = 2.0 * M_PI;
        return (c1_ / 2.0) * (two_pi / c3_) * std::sin(two_pi * tau / c3_);
      }
      return 0.0;
    }
    case Kind::Table: {
      const double tt = fold(t);
      if (tt <= points_.front().first || tt >= points_.back().first) return 0.0;
      auto hi = std::upper_bound(points_.begin(), points_.end(), tt,
                                 [](double v, const auto& p) { return v < p.first; });
      auto lo = hi - 1;
      return (hi->second - lo->second) / (hi->first - lo->first);
    }
    case Kind::Polynomial: {
      double v = 0.0;
      for (std::size_t i = coeffs_.size(); i-- > 1;) v = v * t + coeffs_[i] * static_cast<double>(i);
      return v;
    }
  }
  return 0.0;
}

}  // namespace hemofem
