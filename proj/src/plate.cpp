#include "platecol/plate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace platecol {

Material Material::from_elastic(double e, double nu, double h) {
  if (e <= 0.0 || h <= 0.0 || nu < 0.0 || nu >= 0.5)
    throw std::invalid_argument("material: need E > 0, h > 0, 0 <= nu < 0.5");
  Material m;
  m.youngs_modulus = e;
  m.poisson = nu;
  m.thickness = h;
  m.rigidity = e * h * h * h / (12.0 * (1.0 - nu * nu));
  return m;
}

Material Material::from_rigidity(double d, double nu, double h) {
  if (d <= 0.0 || h <= 0.0 || nu < 0.0 || nu >= 0.5)
    throw std::invalid_argument("material: need D > 0, h > 0, 0 <= nu < 0.5");
  Material m;
  m.poisson = nu;
  m.thickness = h;
  m.rigidity = d;
  m.youngs_modulus = 12.0 * d * (1.0 - nu * nu) / (h * h * h);
  return m;
}

Moments moments(const Jet& w, const Material& mat) {
  const double d = mat.rigidity;
  const double nu = mat.poisson;
  return {
      -d * (w.d(2, 0) + nu * w.d(0, 2)),
      -d * (w.d(0, 2) + nu * w.d(2, 0)),
      -d * (1.0 - nu) * w.d(1, 1),
  };
}

Shears shears(const Jet& w, const Material& mat) {
  const double d = mat.rigidity;
  return {
      -d * (w.d(3, 0) + w.d(1, 2)),
      -d * (w.d(2, 1) + w.d(0, 3)),
  };
}

PlateState plate_state(const Jet& w, const Material& mat) {
  const Moments m = moments(w, mat);
  const Shears q = shears(w, mat);
  return {
      w.value(),   w.d(1, 0),        w.d(0, 1),
      -w.d(2, 0),  -w.d(0, 2),       -2.0 * w.d(1, 1),
      m.mx,        m.my,             m.mxy,
      q.qx,        q.qy,
  };
}

BoundaryCondition BoundaryCondition::clamped(double w, double theta_n) {
  return {BcKind::Clamped, [w](double, double) { return w; },
          [theta_n](double, double) { return theta_n; }};
}

BoundaryCondition BoundaryCondition::simply_supported(double w, double mn) {
  return {BcKind::SimplySupported, [w](double, double) { return w; },
          [mn](double, double) { return mn; }};
}

BoundaryCondition BoundaryCondition::free_edge(double mn, double q) {
  return {BcKind::Free, [mn](double, double) { return mn; },
          [q](double, double) { return q; }};
}

JetFunctional interior_functional(double load, double foundation_k,
                                  const Material& mat) {
  if (mat.rigidity == 0.0)
    throw std::invalid_argument("interior residual: zero bending rigidity");
  JetFunctional f;
  f.coeff[jet_index(4, 0)] = 1.0;
  f.coeff[jet_index(2, 2)] = 2.0;
  f.coeff[jet_index(0, 4)] = 1.0;
  f.coeff[jet_index(0, 0)] = foundation_k / mat.rigidity;
  f.shift = load / mat.rigidity;
  return f;
}

double interior_residual(const Jet& w, double load, double foundation_k,
                         const Material& mat) {
  return interior_functional(load, foundation_k, mat).value(w);
}

namespace {

void check_unit(Vec2 n) {
  if (std::abs(n.x * n.x + n.y * n.y - 1.0) > 1e-9)
    throw std::invalid_argument("boundary residual: normal is not unit length");
}

// Mn = Mx nx^2 + 2 Mxy nx ny + My ny^2, expanded in jet components.
void add_normal_moment(JetFunctional& f, Vec2 n, const Material& mat,
                       double scale) {
  const double d = mat.rigidity;
  const double nu = mat.poisson;
  const double nx2 = n.x * n.x;
  const double ny2 = n.y * n.y;
  f.coeff[jet_index(2, 0)] += scale * -d * (nx2 + nu * ny2);
  f.coeff[jet_index(0, 2)] += scale * -d * (ny2 + nu * nx2);
  f.coeff[jet_index(1, 1)] += scale * -2.0 * d * (1.0 - nu) * n.x * n.y;
}

}  // namespace

std::pair<JetFunctional, JetFunctional> boundary_functionals(
    const BoundaryCondition& bc, Vec2 n, const Material& mat, Vec2 pos) {
  check_unit(n);
  const Vec2 s{-n.y, n.x};
  JetFunctional r1, r2;
  switch (bc.kind) {
    case BcKind::Clamped:
      r1.coeff[jet_index(0, 0)] = 1.0;
      r1.shift = bc.value1(pos.x, pos.y);
      r2.coeff[jet_index(1, 0)] = n.x;
      r2.coeff[jet_index(0, 1)] = n.y;
      r2.shift = bc.value2(pos.x, pos.y);
      break;
    case BcKind::SimplySupported:
      r1.coeff[jet_index(0, 0)] = 1.0;
      r1.shift = bc.value1(pos.x, pos.y);
      add_normal_moment(r2, n, mat, 1.0);
      r2.shift = bc.value2(pos.x, pos.y);
      break;
    case BcKind::Free: {
      add_normal_moment(r1, n, mat, 1.0);
      r1.shift = bc.value1(pos.x, pos.y);
      // Mns = (My - Mx) nx ny + Mxy (nx^2 - ny^2)
      //     = -D (1-nu) [ (w_yy - w_xx) nx ny + w_xy (nx^2 - ny^2) ]
      // dMns/ds takes the gradient of that field along s with n frozen.
      const double d = mat.rigidity;
      const double nu = mat.poisson;
      const double cnn = -d * (1.0 - nu) * n.x * n.y;
      const double cxy = -d * (1.0 - nu) * (n.x * n.x - n.y * n.y);
      // d/dx of Mns, weighted by s.x
      r2.coeff[jet_index(1, 2)] += s.x * cnn;   // w_yyx
      r2.coeff[jet_index(3, 0)] -= s.x * cnn;   // w_xxx
      r2.coeff[jet_index(2, 1)] += s.x * cxy;   // w_xyx
      // d/dy of Mns, weighted by s.y
      r2.coeff[jet_index(0, 3)] += s.y * cnn;   // w_yyy
      r2.coeff[jet_index(2, 1)] -= s.y * cnn;   // w_xxy
      r2.coeff[jet_index(1, 2)] += s.y * cxy;   // w_xyy
      // + Qn = Qx nx + Qy ny
      r2.coeff[jet_index(3, 0)] += -d * n.x;
      r2.coeff[jet_index(1, 2)] += -d * n.x;
      r2.coeff[jet_index(2, 1)] += -d * n.y;
      r2.coeff[jet_index(0, 3)] += -d * n.y;
      r2.shift = bc.value2(pos.x, pos.y);
      break;
    }
  }
  return {r1, r2};
}

std::pair<double, double> boundary_residuals(const Jet& w,
                                             const BoundaryCondition& bc,
                                             Vec2 normal, const Material& mat,
                                             Vec2 position) {
  const auto [r1, r2] = boundary_functionals(bc, normal, mat, position);
  return {r1.value(w), r2.value(w)};
}

PlateProblem ProblemSpec::build() const {
  PlateProblem p;
  p.shape = shape;
  p.a = a;
  p.b = b;
  p.radius = radius;
  p.material = Material::from_rigidity(rigidity, poisson, thickness);
  p.foundation_k = foundation_k;
  if (load_type == "uniform") {
    const double v = load_value;
    p.load = [v](double, double) { return v; };
  } else if (load_type == "sinusoidal") {
    const double v = load_value;
    const double la = a, lb = b;
    p.load = [v, la, lb](double x, double y) {
      return v * std::sin(std::numbers::pi * x / la) *
             std::sin(std::numbers::pi * y / lb);
    };
  } else {
    throw std::invalid_argument("problem: unknown load type \"" + load_type +
                                "\" (expected \"uniform\" or \"sinusoidal\")");
  }
  if (int(boundary.size()) != p.segments())
    throw std::invalid_argument(
        "problem: boundary must list one condition per segment");
  for (const BcSpec& bs : boundary) {
    switch (bs.kind) {
      case BcKind::Clamped:
        p.boundary.push_back(BoundaryCondition::clamped(bs.value1, bs.value2));
        break;
      case BcKind::SimplySupported:
        p.boundary.push_back(
            BoundaryCondition::simply_supported(bs.value1, bs.value2));
        break;
      case BcKind::Free:
        p.boundary.push_back(
            BoundaryCondition::free_edge(bs.value1, bs.value2));
        break;
    }
  }
  return p;
}

}  // namespace platecol
