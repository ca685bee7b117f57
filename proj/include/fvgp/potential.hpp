#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fvgp/geometry.hpp"

namespace fvgp {

/// Real time-dependent potential V(t, x) with its time antiderivative
/// G_n(tau, x) = int_0^tau V(t_n + s, x) ds.
struct Potential {
  std::function<double(double t, Point2 x)> value;
  std::function<double(double t_n, double tau, Point2 x)> antiderivative;
  /// True when the antiderivative comes from numerical quadrature rather
  /// than a closed form.
  bool quadrature_antiderivative = false;
  std::string name = "custom";

  /// Wraps a potential known only through its values; the antiderivative is
  /// computed by adaptive Gauss-Kronrod quadrature.
  static Potential from_value(std::function<double(double, Point2)> v, double tol = 1e-12) {
    Potential p;
    p.value = v;
    p.antiderivative = [v, tol](double t_n, double tau, Point2 x) {
      if (tau == 0.0) return 0.0;
      auto f = [&](double s) { return v(t_n + s, x); };
      return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, tau, 15, tol);
    };
    p.quadrature_antiderivative = true;
    return p;
  }
};

inline Potential zero_potential() {
  Potential p;
  p.value = [](double, Point2) { return 0.0; };
  p.antiderivative = [](double, double, Point2) { return 0.0; };
  p.name = "none";
  return p;
}

/// G_n(tau, x) for V(t, x) = V0 r^2 (1 + eps cos(2 theta - omega t)).
inline double stirrer_antiderivative(double t_n, double tau, Point2 x, double V0, double eps, double omega) {
  const double r2 = dot(x, x);
  const double theta = std::atan2(x.y, x.x);
  if (std::abs(omega * tau) < 1e-12) return V0 * r2 * tau * (1.0 + eps * std::cos(2.0 * theta - omega * t_n));
  // (1/omega) [sin(a) - sin(a - omega tau)] written without cancellation
  const double swing = 2.0 * std::cos(2.0 * theta - omega * (t_n + 0.5 * tau)) * std::sin(0.5 * omega * tau) / omega;
  return V0 * r2 * (tau + eps * swing);
}

/// Harmonic trap perturbed by a rotating sinusoidal stirrer.
inline Potential stirrer_potential(double V0, double eps, double omega) {
  Potential p;
  p.value = [=](double t, Point2 x) {
    return V0 * dot(x, x) * (1.0 + eps * std::cos(2.0 * std::atan2(x.y, x.x) - omega * t));
  };
  p.antiderivative = [=](double t_n, double tau, Point2 x) {
    return stirrer_antiderivative(t_n, tau, x, V0, eps, omega);
  };
  p.name = "stirrer";
  return p;
}

/// Time-independent potential; G_n(tau, x) = tau V(x).
inline Potential static_potential(std::function<double(Point2)> v) {
  Potential p;
  p.value = [v](double, Point2 x) { return v(x); };
  p.antiderivative = [v](double, double tau, Point2 x) { return tau * v(x); };
  p.name = "static";
  return p;
}

}  // namespace fvgp
