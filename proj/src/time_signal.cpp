#include "congflow/time_signal.hpp"

#include <cmath>
#include <stdexcept>

namespace congflow {

TimeSignal TimeSignal::constant(double c) { return TimeSignal(c, {}, {}); }

TimeSignal::TimeSignal(double constant, std::vector<PolyTerm> poly, std::vector<Sinusoid> sinusoids)
    : constant_(constant), poly_(std::move(poly)), sinusoids_(std::move(sinusoids)) {
  if (!std::isfinite(constant_)) throw std::invalid_argument("TimeSignal: non-finite constant");
  for (const auto& p : poly_) {
    if (p.power < 1) throw std::invalid_argument("TimeSignal: polynomial powers start at 1");
    if (!std::isfinite(p.coeff)) throw std::invalid_argument("TimeSignal: non-finite coefficient");
  }
  for (const auto& s : sinusoids_) {
    if (!std::isfinite(s.amplitude) || !std::isfinite(s.omega) || !std::isfinite(s.phase)) {
      throw std::invalid_argument("TimeSignal: non-finite sinusoid");
    }
  }
}

double TimeSignal::value(double t) const {
  double acc = constant_;
  for (const auto& p : poly_) acc += p.coeff * std::pow(t, p.power);
  for (const auto& s : sinusoids_) acc += s.amplitude * std::sin(s.omega * t + s.phase);
  return acc;
}

double TimeSignal::derivative(double t) const {
  double acc = 0.0;
  for (const auto& p : poly_) acc += p.coeff * p.power * std::pow(t, p.power - 1);
  for (const auto& s : sinusoids_) acc += s.amplitude * s.omega * std::cos(s.omega * t + s.phase);
  return acc;
}

}  // namespace congflow
