#include "calibra/graphpde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace calibra {

GridField GridField::zeros(std::vector<int> shape, double h) {
  GridField f;
  f.d = static_cast<int>(shape.size());
  f.shape = std::move(shape);
  f.h = h;
  std::size_t total = 1;
  for (int n : f.shape) total *= static_cast<std::size_t>(n);
  f.values.assign(total, 0.0);
  f.check_shape();
  return f;
}

void GridField::check_shape() const {
  if (d != 2 && d != 3) throw ShapeMismatch("GridField: d must be 2 or 3");
  if (static_cast<int>(shape.size()) != d)
    throw ShapeMismatch("GridField: shape rank mismatch");
  std::size_t total = 1;
  for (int n : shape) {
    if (n < 3) throw ShapeTooSmall("GridField: each axis needs >= 3 nodes");
    total *= static_cast<std::size_t>(n);
  }
  if (values.size() != total) throw ShapeMismatch("GridField: value count mismatch");
  if (!(h > 0.0)) throw ShapeMismatch("GridField: spacing must be positive");
}

namespace {

// ---------------------------------------------------------------------------
// minimal graph operator (d = 2), conservative form
// ---------------------------------------------------------------------------

struct FaceGrad {
  double gn;  // normal derivative across the face
  double gt;  // averaged tangential derivative at the face
};

inline FaceGrad xface_grad(const GridField& f, int i, int j) {
  double gn = (f.at2(i + 1, j) - f.at2(i, j)) / f.h;
  double gt = (f.at2(i, j + 1) - f.at2(i, j - 1) + f.at2(i + 1, j + 1) -
               f.at2(i + 1, j - 1)) /
              (4.0 * f.h);
  return {gn, gt};
}

inline FaceGrad yface_grad(const GridField& f, int i, int j) {
  double gn = (f.at2(i, j + 1) - f.at2(i, j)) / f.h;
  double gt = (f.at2(i + 1, j) - f.at2(i - 1, j) + f.at2(i + 1, j + 1) -
               f.at2(i - 1, j + 1)) /
              (4.0 * f.h);
  return {gn, gt};
}

inline double flux(const FaceGrad& g) {
  return g.gn / std::sqrt(1.0 + g.gn * g.gn + g.gt * g.gt);
}

// Linearized normal flux at a face: d(gn/W) = dgn/W - gn (gn dgn + gt dgt)/W^3.
inline double flux_lin(const FaceGrad& g, const FaceGrad& dg) {
  double w2 = 1.0 + g.gn * g.gn + g.gt * g.gt;
  double w = std::sqrt(w2);
  return dg.gn / w - g.gn * (g.gn * dg.gn + g.gt * dg.gt) / (w2 * w);
}

GridField minimal_residual_impl(const GridField& f) {
  const int n1 = f.shape[0], n2 = f.shape[1];
  GridField r = GridField::zeros(f.shape, f.h);
  for (int i = 1; i < n1 - 1; ++i) {
    for (int j = 1; j < n2 - 1; ++j) {
      double fe = flux(xface_grad(f, i, j));
      double fw = flux(xface_grad(f, i - 1, j));
      double fn = flux(yface_grad(f, i, j));
      double fs = flux(yface_grad(f, i, j - 1));
      r.at2(i, j) = -((fe - fw) + (fn - fs)) / f.h;
    }
  }
  return r;
}

void minimal_jacobian_apply(const GridField& f, const GridField& v, GridField& out) {
  const int n1 = f.shape[0], n2 = f.shape[1];
  for (int i = 1; i < n1 - 1; ++i) {
    for (int j = 1; j < n2 - 1; ++j) {
      double fe = flux_lin(xface_grad(f, i, j), xface_grad(v, i, j));
      double fw = flux_lin(xface_grad(f, i - 1, j), xface_grad(v, i - 1, j));
      double fn = flux_lin(yface_grad(f, i, j), yface_grad(v, i, j));
      double fs = flux_lin(yface_grad(f, i, j - 1), yface_grad(v, i, j - 1));
      out.at2(i, j) = -((fe - fw) + (fn - fs)) / f.h;
    }
  }
}

// ---------------------------------------------------------------------------
// special Lagrangian graph operators
// ---------------------------------------------------------------------------

GridField slag2_residual_impl(const GridField& f) {
  const int n1 = f.shape[0], n2 = f.shape[1];
  const double h2 = f.h * f.h;
  GridField r = GridField::zeros(f.shape, f.h);
  for (int i = 1; i < n1 - 1; ++i)
    for (int j = 1; j < n2 - 1; ++j)
      r.at2(i, j) = (f.at2(i + 1, j) + f.at2(i - 1, j) + f.at2(i, j + 1) +
                     f.at2(i, j - 1) - 4.0 * f.at2(i, j)) /
                    h2;
  return r;
}

struct Hess3 {
  double m[3][3];
};

inline Hess3 hessian3(const GridField& f, int i, int j, int k) {
  const double h2 = f.h * f.h;
  Hess3 out;
  double c = f.at3(i, j, k);
  out.m[0][0] = (f.at3(i + 1, j, k) - 2.0 * c + f.at3(i - 1, j, k)) / h2;
  out.m[1][1] = (f.at3(i, j + 1, k) - 2.0 * c + f.at3(i, j - 1, k)) / h2;
  out.m[2][2] = (f.at3(i, j, k + 1) - 2.0 * c + f.at3(i, j, k - 1)) / h2;
  out.m[0][1] = out.m[1][0] = (f.at3(i + 1, j + 1, k) - f.at3(i + 1, j - 1, k) -
                               f.at3(i - 1, j + 1, k) + f.at3(i - 1, j - 1, k)) /
                              (4.0 * h2);
  out.m[0][2] = out.m[2][0] = (f.at3(i + 1, j, k + 1) - f.at3(i + 1, j, k - 1) -
                               f.at3(i - 1, j, k + 1) + f.at3(i - 1, j, k - 1)) /
                              (4.0 * h2);
  out.m[1][2] = out.m[2][1] = (f.at3(i, j + 1, k + 1) - f.at3(i, j + 1, k - 1) -
                               f.at3(i, j - 1, k + 1) + f.at3(i, j - 1, k - 1)) /
                              (4.0 * h2);
  return out;
}

inline double det3(const Hess3& a) {
  return a.m[0][0] * (a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1]) -
         a.m[0][1] * (a.m[1][0] * a.m[2][2] - a.m[1][2] * a.m[2][0]) +
         a.m[0][2] * (a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0]);
}

// Adjugate of a symmetric 3x3 (equals the cofactor matrix by symmetry).
inline Hess3 adj3(const Hess3& a) {
  Hess3 r;
  r.m[0][0] = a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1];
  r.m[0][1] = a.m[0][2] * a.m[2][1] - a.m[0][1] * a.m[2][2];
  r.m[0][2] = a.m[0][1] * a.m[1][2] - a.m[0][2] * a.m[1][1];
  r.m[1][0] = a.m[1][2] * a.m[2][0] - a.m[1][0] * a.m[2][2];
  r.m[1][1] = a.m[0][0] * a.m[2][2] - a.m[0][2] * a.m[2][0];
  r.m[1][2] = a.m[0][2] * a.m[1][0] - a.m[0][0] * a.m[1][2];
  r.m[2][0] = a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0];
  r.m[2][1] = a.m[0][1] * a.m[2][0] - a.m[0][0] * a.m[2][1];
  r.m[2][2] = a.m[0][0] * a.m[1][1] - a.m[0][1] * a.m[1][0];
  return r;
}

GridField slag3_residual_impl(const GridField& f) {
  const int n1 = f.shape[0], n2 = f.shape[1], n3 = f.shape[2];
  GridField r = GridField::zeros(f.shape, f.h);
  for (int i = 1; i < n1 - 1; ++i)
    for (int j = 1; j < n2 - 1; ++j)
      for (int k = 1; k < n3 - 1; ++k) {
        Hess3 hh = hessian3(f, i, j, k);
        r.at3(i, j, k) = hh.m[0][0] + hh.m[1][1] + hh.m[2][2] - det3(hh);
      }
  return r;
}

void slag3_jacobian_apply(const GridField& f, const GridField& v, GridField& out) {
  const int n1 = f.shape[0], n2 = f.shape[1], n3 = f.shape[2];
  for (int i = 1; i < n1 - 1; ++i)
    for (int j = 1; j < n2 - 1; ++j)
      for (int k = 1; k < n3 - 1; ++k) {
        Hess3 hf = hessian3(f, i, j, k);
        Hess3 hv = hessian3(v, i, j, k);
        Hess3 a = adj3(hf);
        double ddet = 0.0;
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q) ddet += a.m[q][p] * hv.m[p][q];
        out.at3(i, j, k) = hv.m[0][0] + hv.m[1][1] + hv.m[2][2] - ddet;
      }
}

// ---------------------------------------------------------------------------
// shared solver machinery
// ---------------------------------------------------------------------------

int required_dim(Equation eq) { return eq == Equation::slag3 ? 3 : 2; }

GridField residual_of(Equation eq, const GridField& f) {
  switch (eq) {
    case Equation::minimal: return minimal_residual_impl(f);
    case Equation::slag2: return slag2_residual_impl(f);
    case Equation::slag3: return slag3_residual_impl(f);
  }
  throw ShapeMismatch("residual_of: unknown equation");
}

void jacobian_apply(Equation eq, const GridField& f, const GridField& v,
                    GridField& out) {
  std::fill(out.values.begin(), out.values.end(), 0.0);
  switch (eq) {
    case Equation::minimal:
      minimal_jacobian_apply(f, v, out);
      return;
    case Equation::slag2:
      out = slag2_residual_impl(v);
      return;
    case Equation::slag3:
      slag3_jacobian_apply(f, v, out);
      return;
  }
}

// Sign s with linearization-at-zero L = s * (discrete Laplacian).
double laplacian_sign(Equation eq) { return eq == Equation::minimal ? -1.0 : 1.0; }

bool is_boundary(const GridField& f, std::size_t flat) {
  if (f.d == 2) {
    int n2 = f.shape[1];
    int i = static_cast<int>(flat) / n2, j = static_cast<int>(flat) % n2;
    return i == 0 || j == 0 || i == f.shape[0] - 1 || j == n2 - 1;
  }
  int n2 = f.shape[1], n3 = f.shape[2];
  int k = static_cast<int>(flat) % n3;
  int rest = static_cast<int>(flat) / n3;
  int j = rest % n2, i = rest / n2;
  return i == 0 || j == 0 || k == 0 || i == f.shape[0] - 1 || j == n2 - 1 ||
         k == f.shape[2] - 1;
}

double inf_norm_interior(const GridField& f) {
  double m = 0.0;
  for (std::size_t t = 0; t < f.values.size(); ++t)
    if (!is_boundary(f, t)) m = std::max(m, std::abs(f.values[t]));
  return m;
}

double dot_all(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// A = -(discrete Laplacian) with zero Dirichlet boundary, SPD on interiors.
void neg_laplacian_apply(const GridField& u, GridField& out) {
  const double h2 = u.h * u.h;
  std::fill(out.values.begin(), out.values.end(), 0.0);
  if (u.d == 2) {
    for (int i = 1; i < u.shape[0] - 1; ++i)
      for (int j = 1; j < u.shape[1] - 1; ++j)
        out.at2(i, j) = (4.0 * u.at2(i, j) - u.at2(i + 1, j) - u.at2(i - 1, j) -
                         u.at2(i, j + 1) - u.at2(i, j - 1)) /
                        h2;
  } else {
    for (int i = 1; i < u.shape[0] - 1; ++i)
      for (int j = 1; j < u.shape[1] - 1; ++j)
        for (int k = 1; k < u.shape[2] - 1; ++k)
          out.at3(i, j, k) =
              (6.0 * u.at3(i, j, k) - u.at3(i + 1, j, k) - u.at3(i - 1, j, k) -
               u.at3(i, j + 1, k) - u.at3(i, j - 1, k) - u.at3(i, j, k + 1) -
               u.at3(i, j, k - 1)) /
              h2;
  }
}

// Conjugate gradients for -Laplacian u = b, zero boundary, fixed reduction
// order (results are independent of call context).
GridField cg_neg_laplacian(const GridField& b, double rel_tol) {
  GridField x = GridField::zeros(b.shape, b.h);
  GridField r = b;
  for (std::size_t t = 0; t < r.values.size(); ++t)
    if (is_boundary(r, t)) r.values[t] = 0.0;
  GridField p = r;
  GridField ap = GridField::zeros(b.shape, b.h);
  double rr = dot_all(r.values, r.values);
  double r0 = std::sqrt(rr);
  if (r0 == 0.0) return x;
  const double tol = std::max(rel_tol * r0, 1e-300);
  const int max_iter = 40 * static_cast<int>(std::sqrt(static_cast<double>(b.size())) + 100);
  for (int it = 0; it < max_iter; ++it) {
    neg_laplacian_apply(p, ap);
    double pap = dot_all(p.values, ap.values);
    double alpha = rr / pap;
    for (std::size_t t = 0; t < x.values.size(); ++t) {
      x.values[t] += alpha * p.values[t];
      r.values[t] -= alpha * ap.values[t];
    }
    double rr_new = dot_all(r.values, r.values);
    if (std::sqrt(rr_new) < tol) return x;
    double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t t = 0; t < p.values.size(); ++t)
      p.values[t] = r.values[t] + beta * p.values[t];
  }
  return x;  // best effort; callers check outer residuals
}

// BiCGStab on the matrix-free Jacobian (not symmetric in general).
GridField bicgstab(const std::function<void(const GridField&, GridField&)>& op,
                   const GridField& b, double rel_tol) {
  GridField x = GridField::zeros(b.shape, b.h);
  GridField r = b;
  for (std::size_t t = 0; t < r.values.size(); ++t)
    if (is_boundary(r, t)) r.values[t] = 0.0;
  GridField rhat = r, p = r;
  GridField v = GridField::zeros(b.shape, b.h), s = v, tvec = v;
  double rho = dot_all(rhat.values, r.values);
  double r0 = std::sqrt(dot_all(r.values, r.values));
  if (r0 == 0.0) return x;
  const double tol = std::max(rel_tol * r0, 1e-300);
  const int max_iter = 40 * static_cast<int>(std::sqrt(static_cast<double>(b.size())) + 100);
  for (int it = 0; it < max_iter; ++it) {
    op(p, v);
    double alpha = rho / dot_all(rhat.values, v.values);
    for (std::size_t t = 0; t < s.values.size(); ++t)
      s.values[t] = r.values[t] - alpha * v.values[t];
    if (std::sqrt(dot_all(s.values, s.values)) < tol) {
      for (std::size_t t = 0; t < x.values.size(); ++t)
        x.values[t] += alpha * p.values[t];
      return x;
    }
    op(s, tvec);
    double omega = dot_all(tvec.values, s.values) / dot_all(tvec.values, tvec.values);
    for (std::size_t t = 0; t < x.values.size(); ++t)
      x.values[t] += alpha * p.values[t] + omega * s.values[t];
    for (std::size_t t = 0; t < r.values.size(); ++t)
      r.values[t] = s.values[t] - omega * tvec.values[t];
    if (std::sqrt(dot_all(r.values, r.values)) < tol) return x;
    double rho_new = dot_all(rhat.values, r.values);
    double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t t = 0; t < p.values.size(); ++t)
      p.values[t] = r.values[t] + beta * (p.values[t] - omega * v.values[t]);
  }
  return x;
}

GridField with_zero_interior(const GridField& g) {
  GridField out = g;
  for (std::size_t t = 0; t < out.values.size(); ++t)
    if (!is_boundary(out, t)) out.values[t] = 0.0;
  return out;
}

}  // namespace

GridField minimal_residual(const GridField& f) {
  f.check_shape();
  if (f.d != 2) throw UnsupportedDim("minimal_residual: d = 2 only");
  return minimal_residual_impl(f);
}

GridField slag_residual(const GridField& f, int n) {
  f.check_shape();
  if (n != 2 && n != 3) throw UnsupportedDim("slag_residual: n must be 2 or 3");
  if (f.d != n) throw ShapeMismatch("slag_residual: grid dimension != n");
  return n == 2 ? slag2_residual_impl(f) : slag3_residual_impl(f);
}

double lagrangian_check(const std::vector<GridField>& components) {
  if (components.empty()) throw ShapeMismatch("lagrangian_check: no components");
  const GridField& first = components.front();
  first.check_shape();
  const int n = first.d;
  if (static_cast<int>(components.size()) != n)
    throw ShapeMismatch("lagrangian_check: need d = n components");
  for (const GridField& c : components) {
    c.check_shape();
    if (c.shape != first.shape || c.h != first.h)
      throw ShapeMismatch("lagrangian_check: inconsistent grids");
  }
  const double two_h = 2.0 * first.h;
  double worst = 0.0;
  if (n == 2) {
    for (int i = 1; i < first.shape[0] - 1; ++i)
      for (int j = 1; j < first.shape[1] - 1; ++j) {
        double d01 = (components[0].at2(i, j + 1) - components[0].at2(i, j - 1)) / two_h;
        double d10 = (components[1].at2(i + 1, j) - components[1].at2(i - 1, j)) / two_h;
        worst = std::max(worst, std::abs(d01 - d10));
      }
    return worst;
  }
  auto deriv = [&](const GridField& g, int axis, int i, int j, int k) {
    switch (axis) {
      case 0: return (g.at3(i + 1, j, k) - g.at3(i - 1, j, k)) / two_h;
      case 1: return (g.at3(i, j + 1, k) - g.at3(i, j - 1, k)) / two_h;
      default: return (g.at3(i, j, k + 1) - g.at3(i, j, k - 1)) / two_h;
    }
  };
  for (int i = 1; i < first.shape[0] - 1; ++i)
    for (int j = 1; j < first.shape[1] - 1; ++j)
      for (int k = 1; k < first.shape[2] - 1; ++k)
        for (int a = 0; a < 3; ++a)
          for (int b = a + 1; b < 3; ++b)
            worst = std::max(
                worst, std::abs(deriv(components[static_cast<std::size_t>(a)], b, i, j, k) -
                                deriv(components[static_cast<std::size_t>(b)], a, i, j, k)));
  return worst;
}

GridField harmonic_extension(const GridField& g) {
  g.check_shape();
  // Solve -Lap u = 0 with u = g on the boundary: substitute u = g0 + w with
  // g0 the zero-interior extension, then -Lap w = +Lap g0 on interiors.
  GridField g0 = with_zero_interior(g);
  GridField rhs = GridField::zeros(g.shape, g.h);
  neg_laplacian_apply(g0, rhs);
  for (double& v : rhs.values) v = -v;
  GridField w = cg_neg_laplacian(rhs, 1e-13);
  GridField out = g0;
  for (std::size_t t = 0; t < out.values.size(); ++t) out.values[t] += w.values[t];
  return out;
}

namespace {

SolveReport run_newton(Equation eq, const GridField& boundary) {
  boundary.check_shape();
  if (boundary.d != required_dim(eq))
    throw ShapeMismatch("solve_newton: grid dimension does not match equation");
  SolveReport rep;
  rep.method = Method::newton;
  rep.solution = harmonic_extension(boundary);
  GridField res = residual_of(eq, rep.solution);
  double rnorm = inf_norm_interior(res);
  for (int iter = 0; iter < 50; ++iter) {
    if (rnorm < 1e-10) {
      rep.iterations = iter;
      rep.residual_norm = rnorm;
      return rep;
    }
    GridField rhs = res;
    for (double& v : rhs.values) v = -v;
    const GridField& base = rep.solution;
    GridField delta = bicgstab(
        [&](const GridField& in, GridField& out) { jacobian_apply(eq, base, in, out); },
        rhs, 1e-12);
    double step = 1.0;
    bool accepted = false;
    for (int back = 0; back < 25; ++back) {
      GridField trial = rep.solution;
      for (std::size_t t = 0; t < trial.values.size(); ++t)
        trial.values[t] += step * delta.values[t];
      GridField tres = residual_of(eq, trial);
      double tnorm = inf_norm_interior(tres);
      if (tnorm < rnorm) {
        rep.solution = std::move(trial);
        res = std::move(tres);
        rnorm = tnorm;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      rep.iterations = iter + 1;
      rep.residual_norm = rnorm;
      throw SolveFailure("solve_newton: damping stalled", std::move(rep));
    }
  }
  rep.iterations = 50;
  rep.residual_norm = rnorm;
  if (rnorm < 1e-10) return rep;
  throw SolveFailure("solve_newton: residual target missed after 50 iterations",
                     std::move(rep));
}

SolveReport run_picard(Equation eq, const GridField& boundary) {
  boundary.check_shape();
  if (boundary.d != required_dim(eq))
    throw ShapeMismatch("solve_picard: grid dimension does not match equation");
  const double sign = laplacian_sign(eq);
  SolveReport rep;
  rep.method = Method::picard;
  rep.solution = harmonic_extension(boundary);
  for (int iter = 1; iter <= 500; ++iter) {
    GridField res = residual_of(eq, rep.solution);
    // f <- f - L^{-1} R(f), L = sign * Laplacian; correction has zero boundary.
    GridField rhs = res;
    for (double& v : rhs.values) v = sign * v;  // -(L^{-1} R) = (-Lap)^{-1} (sign R)
    GridField corr = cg_neg_laplacian(rhs, 1e-13);
    double move = inf_norm_interior(corr);
    for (std::size_t t = 0; t < rep.solution.values.size(); ++t)
      rep.solution.values[t] -= corr.values[t];
    if (!std::isfinite(move)) {
      rep.iterations = iter;
      rep.residual_norm = std::numeric_limits<double>::infinity();
      throw SolveFailure("solve_picard: iteration diverged", std::move(rep));
    }
    if (move < 1e-11) {
      rep.iterations = iter;
      rep.residual_norm = inf_norm_interior(residual_of(eq, rep.solution));
      return rep;
    }
    if (move > 1e6) {
      rep.iterations = iter;
      rep.residual_norm = inf_norm_interior(res);
      throw SolveFailure("solve_picard: iteration diverged", std::move(rep));
    }
  }
  rep.iterations = 500;
  rep.residual_norm = inf_norm_interior(residual_of(eq, rep.solution));
  throw SolveFailure("solve_picard: no convergence in 500 iterations (outside the "
                     "contraction regime)",
                     std::move(rep));
}

}  // namespace

SolveReport solve_newton(Equation eq, const GridField& boundary) {
  return run_newton(eq, boundary);
}

SolveReport solve_picard(Equation eq, const GridField& boundary) {
  return run_picard(eq, boundary);
}

namespace {

void periodic_neg_laplacian(const GridField& u, GridField& out) {
  const double h2 = u.h * u.h;
  const int n1 = u.shape[0], n2 = u.shape[1];
  for (int i = 0; i < n1; ++i) {
    int ip = (i + 1) % n1, im = (i + n1 - 1) % n1;
    for (int j = 0; j < n2; ++j) {
      int jp = (j + 1) % n2, jm = (j + n2 - 1) % n2;
      out.at2(i, j) = (4.0 * u.at2(i, j) - u.at2(ip, j) - u.at2(im, j) -
                       u.at2(i, jp) - u.at2(i, jm)) /
                      h2;
    }
  }
}

void subtract_mean(GridField& g) {
  double mean = 0.0;
  for (double v : g.values) mean += v;
  mean /= static_cast<double>(g.values.size());
  for (double& v : g.values) v -= mean;
}

}  // namespace

GridField poisson_periodic(const GridField& rhs) {
  rhs.check_shape();
  if (rhs.d != 2) throw UnsupportedDim("poisson_periodic: d = 2 only");
  // Solvability needs the right-hand side orthogonal to the constants; the
  // solve enforces it by mean subtraction and gauges the solution to mean 0.
  GridField b = rhs;
  for (double& v : b.values) v = -v;  // solve -Lap u = -rhs  <=>  Lap u = rhs
  subtract_mean(b);
  GridField x = GridField::zeros(rhs.shape, rhs.h);
  GridField r = b, p = b, ap = GridField::zeros(rhs.shape, rhs.h);
  double rr = dot_all(r.values, r.values);
  double r0 = std::sqrt(rr);
  if (r0 == 0.0) return x;
  for (int it = 0; it < 20000; ++it) {
    periodic_neg_laplacian(p, ap);
    double alpha = rr / dot_all(p.values, ap.values);
    for (std::size_t t = 0; t < x.values.size(); ++t) {
      x.values[t] += alpha * p.values[t];
      r.values[t] -= alpha * ap.values[t];
    }
    double rr_new = dot_all(r.values, r.values);
    if (std::sqrt(rr_new) < 1e-13 * r0) break;
    double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t t = 0; t < p.values.size(); ++t)
      p.values[t] = r.values[t] + beta * p.values[t];
  }
  subtract_mean(x);
  return x;
}

void write_grid(const GridField& f, std::ostream& out) {
  f.check_shape();
  out << "GRID " << f.d;
  for (int n : f.shape) out << ' ' << n;
  char buf[64];
  std::snprintf(buf, sizeof(buf), " %.17g\n", f.h);
  out << buf;
  for (double v : f.values) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out << buf;
  }
}

GridField read_grid(std::istream& in) {
  std::string magic;
  in >> magic;
  if (magic != "GRID") throw ShapeMismatch("read_grid: missing GRID header");
  int d = 0;
  in >> d;
  if (d != 2 && d != 3) throw ShapeMismatch("read_grid: bad dimension");
  std::vector<int> shape(static_cast<std::size_t>(d));
  for (int& n : shape) in >> n;
  double h = 0.0;
  in >> h;
  GridField f = GridField::zeros(shape, h);
  for (double& v : f.values) {
    if (!(in >> v)) throw ShapeMismatch("read_grid: truncated value list");
  }
  return f;
}

}  // namespace calibra
