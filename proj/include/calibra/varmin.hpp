#pragma once

#include <functional>
#include <string>

#include "calibra/forms.hpp"

namespace calibra {

/// A parametrized surface patch (u,v) -> R^m, m in 3..8, over a rectangle.
/// Derivatives use the analytic callables when provided; otherwise central
/// differences with h = 1e-5 (first order) and h = 1e-4 (second order).
/// Immersion callables must be pure and evaluable slightly outside the
/// domain rectangle (the stencils reach past the boundary).
struct SurfacePatch {
  std::function<Vec(double, double)> immersion;
  int ambient = 3;
  double u0 = 0.0, u1 = 1.0;
  double v0 = 0.0, v1 = 1.0;

  std::function<Vec(double, double)> du, dv;         // optional
  std::function<Vec(double, double)> duu, duv, dvv;  // optional
};

struct VariationField {
  std::function<Vec(double, double)> field;
  bool compact_support = false;
};

/// Mean curvature vector: trace of the second fundamental form in an
/// orthonormal tangent frame; normal-valued (tangential part checked).
Vec mean_curvature(const SurfacePatch& patch, double u, double v);

/// Surface area by tensor-product composite Simpson quadrature with nu x nv
/// subintervals (odd counts are rounded up to even).
double area(const SurfacePatch& patch, int nu, int nv);

struct FirstVariation {
  double lhs = 0.0;  // d/dt area(patch + t X) at t = 0, Richardson-extrapolated
  double rhs = 0.0;  // -int <X, H> dA
};

/// Both sides of the first variation formula, for comparison.  X must be
/// compactly supported (vanishing on the domain boundary).
FirstVariation first_variation(const SurfacePatch& patch, const VariationField& x,
                               int nu, int nv);

SurfacePatch preset_helicoid();
SurfacePatch preset_catenoid();
SurfacePatch preset_sphere();

/// Graph patch (u, v, f(u,v)) over [0,1]^2 from a parsed expression.
SurfacePatch preset_graph(const std::string& expression);

}  // namespace calibra
