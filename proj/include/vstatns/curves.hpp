#pragma once

#include <functional>
#include <string>
#include <vector>

namespace vstatns {

/// Scalar function of rescaled time, restricted to a small set of named
/// parametric families so model descriptors round-trip through JSON.
/// Custom curves are allowed in code but are not serializable.
struct Curve {
  enum class Family {
    Constant,          // c
    Linear,            // a + b t
    Cosine,            // a + b cos(2 pi freq t + phase)
    SqrtLinear,        // sqrt(a + b t)
    SqrtCosine,        // sqrt(a + b cos(2 pi freq t + phase))
    PiecewiseConstant, // values[i] on (knots[i], knots[i+1]]
    Custom,
  };

  Family family = Family::Constant;
  double a = 0.0, b = 0.0, freq = 1.0, phase = 0.0;
  double c = 0.0;
  std::vector<double> knots;   // interior knots, strictly increasing in (0,1)
  std::vector<double> values;  // size knots.size()+1
  std::function<double(double)> fn;

  double operator()(double t) const;

  static Curve constant(double c);
  static Curve linear(double a, double b);
  static Curve cosine(double a, double b, double freq = 1.0, double phase = 0.0);
  static Curve sqrt_linear(double a, double b);
  static Curve sqrt_cosine(double a, double b, double freq = 1.0, double phase = 0.0);
  static Curve piecewise_constant(std::vector<double> knots, std::vector<double> values);
  static Curve custom(std::function<double(double)> fn);
};

/// Symmetric bivariate function on [0,1]^2 for global weight families.
struct Surface {
  enum class Family {
    Constant,   // c
    OnePlusTs,  // 1 + c t s
    Custom,
  };

  Family family = Family::Constant;
  double c = 1.0;
  std::function<double(double, double)> fn;

  double operator()(double t, double s) const;

  static Surface constant(double c);
  static Surface one_plus_ts(double c = 1.0);
  static Surface custom(std::function<double(double, double)> fn);
};

/// Decay profile on [0, inf) for banded Toeplitz weights.
struct DecayFn {
  enum class Family { Exp, Gaussian, Constant, Custom };

  Family family = Family::Exp;
  std::function<double(double)> fn;

  double operator()(double x) const;

  static DecayFn exp_decay();
  static DecayFn gaussian();
  static DecayFn constant();
  static DecayFn custom(std::function<double(double)> fn);
  const char* name() const;
};

}  // namespace vstatns
