#pragma once

#include <vector>

namespace congflow {

// Scalar function of time with a closed-form derivative:
// constant + polynomial + sum of sinusoids A*sin(w*t + phi).
class TimeSignal {
 public:
  struct PolyTerm {
    int power = 1;
    double coeff = 0.0;
  };
  struct Sinusoid {
    double amplitude = 0.0;
    double omega = 0.0;
    double phase = 0.0;
  };

  TimeSignal() = default;
  static TimeSignal constant(double c);

  TimeSignal(double constant, std::vector<PolyTerm> poly, std::vector<Sinusoid> sinusoids);

  double value(double t) const;
  double derivative(double t) const;
  bool is_constant() const { return poly_.empty() && sinusoids_.empty(); }

  double constant_part() const { return constant_; }
  const std::vector<PolyTerm>& poly() const { return poly_; }
  const std::vector<Sinusoid>& sinusoids() const { return sinusoids_; }

 private:
  double constant_ = 0.0;
  std::vector<PolyTerm> poly_;
  std::vector<Sinusoid> sinusoids_;
};

}  // namespace congflow
