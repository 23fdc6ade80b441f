#include "vstatns/curves.hpp"

#include <cmath>

#include "vstatns/common.hpp"

namespace vstatns {

double Curve::operator()(double t) const {
  switch (family) {
    case Family::Constant:
      return c;
    case Family::Linear:
      return a + b * t;
    case Family::Cosine:
      return a + b * std::cos(kTwoPi * freq * t + phase);
    case Family::SqrtLinear:
      return std::sqrt(a + b * t);
    case Family::SqrtCosine:
      return std::sqrt(a + b * std::cos(kTwoPi * freq * t + phase));
    case Family::PiecewiseConstant: {
      // values[i] on (knots[i-1], knots[i]], left-closed at 0.
      std::size_t i = 0;
      while (i < knots.size() && t > knots[i]) ++i;
      return values[i];
    }
    case Family::Custom:
      return fn(t);
  }
  return 0.0;
}

Curve Curve::constant(double c) {
  Curve cu;
  cu.family = Family::Constant;
  cu.c = c;
  return cu;
}

Curve Curve::linear(double a, double b) {
  Curve cu;
  cu.family = Family::Linear;
  cu.a = a;
  cu.b = b;
  return cu;
}

Curve Curve::cosine(double a, double b, double freq, double phase) {
  Curve cu;
  cu.family = Family::Cosine;
  cu.a = a;
  cu.b = b;
  cu.freq = freq;
  cu.phase = phase;
  return cu;
}

Curve Curve::sqrt_linear(double a, double b) {
  Curve cu = linear(a, b);
  cu.family = Family::SqrtLinear;
  return cu;
}

Curve Curve::sqrt_cosine(double a, double b, double freq, double phase) {
  Curve cu = cosine(a, b, freq, phase);
  cu.family = Family::SqrtCosine;
  return cu;
}

Curve Curve::piecewise_constant(std::vector<double> knots, std::vector<double> values) {
  require(values.size() == knots.size() + 1, "piecewise_constant needs one more value than knots");
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    require(knots[i] < knots[i + 1], "piecewise_constant knots must be strictly increasing");
  }
  Curve cu;
  cu.family = Family::PiecewiseConstant;
  cu.knots = std::move(knots);
  cu.values = std::move(values);
  return cu;
}

Curve Curve::custom(std::function<double(double)> fn) {
  Curve cu;
  cu.family = Family::Custom;
  cu.fn = std::move(fn);
  return cu;
}

double Surface::operator()(double t, double s) const {
  switch (family) {
    case Family::Constant:
      return c;
    case Family::OnePlusTs:
      return 1.0 + c * t * s;
    case Family::Custom:
      return fn(t, s);
  }
  return 0.0;
}

Surface Surface::constant(double c) {
  Surface f;
  f.family = Family::Constant;
  f.c = c;
  return f;
}

Surface Surface::one_plus_ts(double c) {
  Surface f;
  f.family = Family::OnePlusTs;
  f.c = c;
  return f;
}

Surface Surface::custom(std::function<double(double, double)> fn) {
  Surface f;
  f.family = Family::Custom;
  f.fn = std::move(fn);
  return f;
}

double DecayFn::operator()(double x) const {
  switch (family) {
    case Family::Exp:
      return std::exp(-x);
    case Family::Gaussian:
      return std::exp(-x * x);
    case Family::Constant:
      return 1.0;
    case Family::Custom:
      return fn(x);
  }
  return 0.0;
}

DecayFn DecayFn::exp_decay() { return DecayFn{Family::Exp, nullptr}; }
DecayFn DecayFn::gaussian() { return DecayFn{Family::Gaussian, nullptr}; }
DecayFn DecayFn::constant() { return DecayFn{Family::Constant, nullptr}; }

DecayFn DecayFn::custom(std::function<double(double)> fn) {
  return DecayFn{Family::Custom, std::move(fn)};
}

const char* DecayFn::name() const {
  switch (family) {
    case Family::Exp:
      return "exp";
    case Family::Gaussian:
      return "gaussian";
    case Family::Constant:
      return "constant";
    case Family::Custom:
      return "custom";
  }
  return "?";
}

}  // namespace vstatns
