#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "platecol/jet.hpp"

namespace platecol {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

// Isotropic plate material. `rigidity` is D = E h^3 / (12 (1 - nu^2)).
struct Material {
  double youngs_modulus = 0.0;
  double poisson = 0.3;
  double thickness = 0.1;
  double rigidity = 1.0;

  static Material from_elastic(double e, double nu, double h);
  static Material from_rigidity(double d, double nu, double h = 0.1);
};

struct Moments {
  double mx, my, mxy;
};
struct Shears {
  double qx, qy;
};

// All pointwise Kirchhoff quantities derived from a deflection jet.
struct PlateState {
  double w, wx, wy;
  double kx, ky, kxy;  // curvatures: -w_xx, -w_yy, -2 w_xy
  double mx, my, mxy;
  double qx, qy;
};

Moments moments(const Jet& w, const Material& mat);
Shears shears(const Jet& w, const Material& mat);
PlateState plate_state(const Jet& w, const Material& mat);

enum class BcKind { Clamped, SimplySupported, Free };

// Prescribed boundary data; the meaning of the two values depends on kind:
//   Clamped:          w~, theta_n~
//   SimplySupported:  w~, Mn~
//   Free:             Mn~, q~
// Values are functions of boundary position; constants are the common case.
struct BoundaryCondition {
  BcKind kind = BcKind::Clamped;
  std::function<double(double, double)> value1, value2;

  static BoundaryCondition clamped(double w = 0.0, double theta_n = 0.0);
  static BoundaryCondition simply_supported(double w = 0.0, double mn = 0.0);
  static BoundaryCondition free_edge(double mn = 0.0, double q = 0.0);
};

// r = <coeff, jet> - shift; every interior and boundary residual used by the
// loss is linear in the jet components, so this one form drives both direct
// evaluation and the gradient seeds.
struct JetFunctional {
  std::array<double, kJetCount> coeff{};
  double shift = 0.0;

  double value(const Jet& w) const {
    double r = -shift;
    for (int s = 0; s < kJetCount; ++s) r += coeff[s] * w.c[s];
    return r;
  }
};

// Interior residual of the governing equation with optional Winkler
// foundation: biharmonic(w) - (p - k w) / D. Throws on zero rigidity.
JetFunctional interior_functional(double load, double foundation_k,
                                  const Material& mat);
double interior_residual(const Jet& w, double load, double foundation_k,
                         const Material& mat);

// The two residual equations of the boundary class at a boundary point with
// outward unit normal n (tangent s = n rotated +90 degrees):
//   Clamped:          w - w~,   dw/dn - theta_n~
//   SimplySupported:  w - w~,   Mn - Mn~
//   Free:             Mn - Mn~, dMns/ds + Qn - q~
// Mn, Mns, Qn are the moment/shear components rotated into the (n, s) frame;
// dMns/ds is the tangential directional derivative of the Mns field with the
// normal frozen at the evaluation point. Throws on a non-unit normal.
std::pair<JetFunctional, JetFunctional> boundary_functionals(
    const BoundaryCondition& bc, Vec2 normal, const Material& mat,
    Vec2 position);
std::pair<double, double> boundary_residuals(const Jet& w,
                                             const BoundaryCondition& bc,
                                             Vec2 normal, const Material& mat,
                                             Vec2 position = {});

// Geometry, material, load and boundary assignment of one bending problem.
// Rectangles span (0,a) x (0,b) with boundary segments 0: x=0, 1: x=a,
// 2: y=0, 3: y=b; disks are centred at the origin with a single segment.
struct PlateProblem {
  enum class Shape { Rectangle, Disk };

  Shape shape = Shape::Rectangle;
  double a = 1.0, b = 1.0;
  double radius = 1.0;
  Material material = Material::from_rigidity(1.0, 0.3);
  std::function<double(double, double)> load;
  double foundation_k = 0.0;
  std::vector<BoundaryCondition> boundary;

  Vec2 center() const {
    return shape == Shape::Rectangle ? Vec2{a / 2.0, b / 2.0} : Vec2{0.0, 0.0};
  }
  int segments() const { return shape == Shape::Rectangle ? 4 : 1; }
};

// Serializable description of a problem; the std::function members of
// PlateProblem are built from this.
struct BcSpec {
  BcKind kind = BcKind::Clamped;
  double value1 = 0.0, value2 = 0.0;
};

struct ProblemSpec {
  PlateProblem::Shape shape = PlateProblem::Shape::Rectangle;
  double a = 1.0, b = 1.0, radius = 1.0;
  double rigidity = 1.0, poisson = 0.3, thickness = 0.1;
  std::string load_type = "uniform";  // "uniform" | "sinusoidal"
  double load_value = 1.0;            // p0 for both types
  double foundation_k = 0.0;
  std::vector<BcSpec> boundary;

  PlateProblem build() const;
};

}  // namespace platecol
