#pragma once

#include <array>
#include <cmath>

#include "platecol/kernels.hpp"

namespace platecol {

// Value of a scalar field of (x, y) together with all of its partial
// derivatives up to total order 4, stored as raw derivative values (not
// factorial-scaled series coefficients). Arithmetic propagates derivatives
// exactly, so applying the plate operators to a jet of the deflection gives
// curvatures, moments, shears and the fourth-order interior residual without
// any finite differencing.
struct Jet {
  alignas(32) std::array<double, kJetSlots> c{};

  double value() const { return c[0]; }
  double d(int dx, int dy) const { return c[jet_index(dx, dy)]; }
  double& d(int dx, int dy) { return c[jet_index(dx, dy)]; }

  static Jet constant(double v) {
    Jet j;
    j.c[0] = v;
    return j;
  }

  // Seed for the coordinate x at evaluation point (x0, y0).
  static Jet variable_x(double x0, double /*y0*/) {
    Jet j;
    j.c[0] = x0;
    j.c[jet_index(1, 0)] = 1.0;
    return j;
  }

  static Jet variable_y(double /*x0*/, double y0) {
    Jet j;
    j.c[0] = y0;
    j.c[jet_index(0, 1)] = 1.0;
    return j;
  }

  Jet& operator+=(const Jet& o) {
    for (int s = 0; s < kJetSlots; ++s) c[s] += o.c[s];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int s = 0; s < kJetSlots; ++s) c[s] -= o.c[s];
    return *this;
  }
  Jet& operator*=(double a) {
    kernels::active().scale(c.data(), a);
    return *this;
  }
  Jet& operator+=(double a) {
    c[0] += a;
    return *this;
  }
  Jet& operator-=(double a) {
    c[0] -= a;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(const Jet& a) {
    Jet r;
    for (int s = 0; s < kJetSlots; ++s) r.c[s] = -a.c[s];
    return r;
  }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    kernels::active().mul(r.c.data(), a.c.data(), b.c.data());
    return r;
  }
};

inline bool all_finite(const Jet& j) {
  for (int s = 0; s < kJetCount; ++s)
    if (!std::isfinite(j.c[s])) return false;
  return true;
}

// Derivatives of tanh at t = tanh(a): d[0] = t, d[k] = tanh^(k)(a).
inline std::array<double, 6> tanh_derivatives(double a) {
  const double t = std::tanh(a);
  const double d1 = 1.0 - t * t;
  const double d2 = -2.0 * t * d1;
  const double d3 = -2.0 * (d1 * d1 + t * d2);
  const double d4 = -2.0 * (3.0 * d1 * d2 + t * d3);
  const double d5 = -2.0 * (3.0 * d2 * d2 + 4.0 * d1 * d3 + t * d4);
  return {t, d1, d2, d3, d4, d5};
}

// Composition tanh(a) through the truncated algebra. With u = a minus its
// value, the order-4 truncation of the series
//   tanh(a) = t + t'u + t''/2 u^2 + t'''/6 u^3 + t''''/24 u^4
// evaluated by Horner's scheme is exact for all 15 stored derivatives.
inline Jet tanh(const Jet& a) {
  const auto& k = kernels::active();
  const auto d = tanh_derivatives(a.c[0]);
  const double c1 = d[1];
  const double c2 = d[2] / 2.0;
  const double c3 = d[3] / 6.0;
  const double c4 = d[4] / 24.0;

  Jet u = a;
  u.c[0] = 0.0;

  Jet h3;
  for (int s = 0; s < kJetSlots; ++s) h3.c[s] = c4 * u.c[s];
  h3.c[0] = c3;

  Jet h2;
  k.mul(h2.c.data(), u.c.data(), h3.c.data());
  h2.c[0] += c2;

  Jet h1;
  k.mul(h1.c.data(), u.c.data(), h2.c.data());
  h1.c[0] += c1;

  Jet r;
  k.mul(r.c.data(), u.c.data(), h1.c.data());
  r.c[0] += d[0];
  return r;
}

// Biharmonic operator: w_xxxx + 2 w_xxyy + w_yyyy.
inline double biharmonic(const Jet& w) {
  return w.d(4, 0) + 2.0 * w.d(2, 2) + w.d(0, 4);
}

}  // namespace platecol
