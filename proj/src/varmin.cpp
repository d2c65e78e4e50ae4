#include "calibra/varmin.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "calibra/expr.hpp"

namespace calibra {

namespace {

constexpr double kH1 = 1e-5;  // first-derivative step
constexpr double kH2 = 1e-4;  // second-derivative step

Vec fd(const std::function<Vec(double, double)>& f, double u, double v, bool in_u,
       double h) {
  Vec a = in_u ? f(u + h, v) : f(u, v + h);
  Vec b = in_u ? f(u - h, v) : f(u, v - h);
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = (a[i] - b[i]) / (2.0 * h);
  return r;
}

Vec fd2(const std::function<Vec(double, double)>& f, double u, double v, int which) {
  // which: 0 = uu, 1 = uv, 2 = vv
  const double h = kH2;
  Vec c = f(u, v);
  Vec r(c.size());
  if (which == 0) {
    Vec a = f(u + h, v), b = f(u - h, v);
    for (std::size_t i = 0; i < c.size(); ++i) r[i] = (a[i] - 2.0 * c[i] + b[i]) / (h * h);
  } else if (which == 2) {
    Vec a = f(u, v + h), b = f(u, v - h);
    for (std::size_t i = 0; i < c.size(); ++i) r[i] = (a[i] - 2.0 * c[i] + b[i]) / (h * h);
  } else {
    Vec pp = f(u + h, v + h), pm = f(u + h, v - h);
    Vec mp = f(u - h, v + h), mm = f(u - h, v - h);
    for (std::size_t i = 0; i < c.size(); ++i)
      r[i] = (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h);
  }
  return r;
}

Vec d_u(const SurfacePatch& p, double u, double v) {
  return p.du ? p.du(u, v) : fd(p.immersion, u, v, true, kH1);
}
Vec d_v(const SurfacePatch& p, double u, double v) {
  return p.dv ? p.dv(u, v) : fd(p.immersion, u, v, false, kH1);
}

}  // namespace

Vec mean_curvature(const SurfacePatch& patch, double u, double v) {
  Vec xu = d_u(patch, u, v);
  Vec xv = d_v(patch, u, v);
  double e = dot(xu, xu), f = dot(xu, xv), g = dot(xv, xv);
  double det = e * g - f * f;
  if (det < 1e-12) throw DegenerateMetric("mean_curvature: singular first fundamental form");

  Vec xuu = patch.duu ? patch.duu(u, v) : fd2(patch.immersion, u, v, 0);
  Vec xuv = patch.duv ? patch.duv(u, v) : fd2(patch.immersion, u, v, 1);
  Vec xvv = patch.dvv ? patch.dvv(u, v) : fd2(patch.immersion, u, v, 2);

  // H = g^{ij} (d_ij X)^perp; inverse metric entries over det.
  const std::size_t m = xu.size();
  Vec h(m);
  for (std::size_t i = 0; i < m; ++i)
    h[i] = (g * xuu[i] - 2.0 * f * xuv[i] + e * xvv[i]) / det;

  // Project out the tangential part (the Christoffel contribution).
  double cu = (dot(h, xu) * g - dot(h, xv) * f) / det;
  double cv = (dot(h, xv) * e - dot(h, xu) * f) / det;
  for (std::size_t i = 0; i < m; ++i) h[i] -= cu * xu[i] + cv * xv[i];

  double tangential = std::hypot(dot(h, xu) / std::sqrt(e), dot(h, xv) / std::sqrt(g));
  if (tangential > 1e-8 * (1.0 + norm(h)))
    throw DegenerateMetric("mean_curvature: tangential residual too large");
  return h;
}

namespace {

// Composite Simpson weights for n (even) subintervals.
std::vector<double> simpson_weights(int n, double h) {
  std::vector<double> w(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) {
    double c = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w[static_cast<std::size_t>(i)] = c * h / 3.0;
  }
  return w;
}

double area_element(const SurfacePatch& p, double u, double v) {
  Vec xu = d_u(p, u, v);
  Vec xv = d_v(p, u, v);
  double e = dot(xu, xu), f = dot(xu, xv), g = dot(xv, xv);
  double det = e * g - f * f;
  if (!std::isfinite(det) || det < -1e-12)
    throw DegenerateMetric("area: invalid first fundamental form");
  return std::sqrt(std::max(0.0, det));
}

// Pairwise (cascade) summation over a grid of weighted samples keeps the
// reduction order fixed and the rounding error low.
double pairwise_sum(std::vector<double>& vals, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return vals[lo];
  std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(vals, lo, mid) + pairwise_sum(vals, mid, hi);
}

}  // namespace

double area(const SurfacePatch& patch, int nu, int nv) {
  if (nu < 2 || nv < 2) throw ShapeTooSmall("area: need at least 2 subintervals");
  if (nu % 2 == 1) ++nu;
  if (nv % 2 == 1) ++nv;
  const double hu = (patch.u1 - patch.u0) / nu;
  const double hv = (patch.v1 - patch.v0) / nv;
  std::vector<double> wu = simpson_weights(nu, hu);
  std::vector<double> wv = simpson_weights(nv, hv);
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>((nu + 1) * (nv + 1)));
  for (int i = 0; i <= nu; ++i) {
    double u = patch.u0 + i * hu;
    for (int j = 0; j <= nv; ++j) {
      double v = patch.v0 + j * hv;
      vals.push_back(wu[static_cast<std::size_t>(i)] * wv[static_cast<std::size_t>(j)] *
                     area_element(patch, u, v));
    }
  }
  return pairwise_sum(vals, 0, vals.size());
}

FirstVariation first_variation(const SurfacePatch& patch, const VariationField& x,
                               int nu, int nv) {
  if (!x.compact_support)
    throw PreconditionViolated("first_variation: X must be compactly supported");
  // Check the vanishing-boundary claim at samples.
  const int checks = 17;
  for (int i = 0; i <= checks; ++i) {
    double s = static_cast<double>(i) / checks;
    double us = patch.u0 + s * (patch.u1 - patch.u0);
    double vs = patch.v0 + s * (patch.v1 - patch.v0);
    for (const Vec& val :
         {x.field(us, patch.v0), x.field(us, patch.v1), x.field(patch.u0, vs),
          x.field(patch.u1, vs)}) {
      if (norm(val) > 1e-12)
        throw PreconditionViolated("first_variation: X does not vanish on the boundary");
    }
  }

  auto perturbed = [&](double t) {
    SurfacePatch q;
    q.ambient = patch.ambient;
    q.u0 = patch.u0;
    q.u1 = patch.u1;
    q.v0 = patch.v0;
    q.v1 = patch.v1;
    q.immersion = [&, t](double u, double v) {
      Vec base = patch.immersion(u, v);
      Vec xv = x.field(u, v);
      for (std::size_t i = 0; i < base.size(); ++i) base[i] += t * xv[i];
      return base;
    };
    return q;  // derivatives by finite differences of the sum
  };

  FirstVariation out;
  // Central difference in t with one Richardson step.
  const double t1 = 1e-4, t2 = 5e-5;
  double d1 = (area(perturbed(t1), nu, nv) - area(perturbed(-t1), nu, nv)) / (2.0 * t1);
  double d2 = (area(perturbed(t2), nu, nv) - area(perturbed(-t2), nu, nv)) / (2.0 * t2);
  out.lhs = (4.0 * d2 - d1) / 3.0;

  // rhs = -int <X, H> dA.  The integrand vanishes on the boundary with X, so
  // boundary nodes are skipped (H may be undefined there for degenerate
  // parametrizations).
  int mu = (nu % 2 == 1) ? nu + 1 : nu;
  int mv = (nv % 2 == 1) ? nv + 1 : nv;
  const double hu = (patch.u1 - patch.u0) / mu;
  const double hv = (patch.v1 - patch.v0) / mv;
  std::vector<double> wu = simpson_weights(mu, hu);
  std::vector<double> wv = simpson_weights(mv, hv);
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>((mu - 1) * (mv - 1)));
  for (int i = 1; i < mu; ++i) {
    double u = patch.u0 + i * hu;
    for (int j = 1; j < mv; ++j) {
      double v = patch.v0 + j * hv;
      Vec xv = x.field(u, v);
      double w = wu[static_cast<std::size_t>(i)] * wv[static_cast<std::size_t>(j)];
      if (norm(xv) == 0.0) {
        vals.push_back(0.0);
        continue;
      }
      Vec h = mean_curvature(patch, u, v);
      vals.push_back(-w * dot(xv, h) * area_element(patch, u, v));
    }
  }
  out.rhs = vals.empty() ? 0.0 : pairwise_sum(vals, 0, vals.size());
  return out;
}

SurfacePatch preset_helicoid() {
  SurfacePatch p;
  p.ambient = 3;
  p.u0 = 0.0;
  p.u1 = 2.0 * M_PI;
  p.v0 = -1.5;
  p.v1 = 1.5;
  // (t cos s, t sin s, s) with u = s, v = t
  p.immersion = [](double s, double t) { return Vec{t * std::cos(s), t * std::sin(s), s}; };
  p.du = [](double s, double t) { return Vec{-t * std::sin(s), t * std::cos(s), 1.0}; };
  p.dv = [](double s, double) { return Vec{std::cos(s), std::sin(s), 0.0}; };
  p.duu = [](double s, double t) { return Vec{-t * std::cos(s), -t * std::sin(s), 0.0}; };
  p.duv = [](double s, double) { return Vec{-std::sin(s), std::cos(s), 0.0}; };
  p.dvv = [](double, double) { return Vec{0.0, 0.0, 0.0}; };
  return p;
}

SurfacePatch preset_catenoid() {
  SurfacePatch p;
  p.ambient = 3;
  p.u0 = 0.0;
  p.u1 = 2.0 * M_PI;
  p.v0 = -1.5;
  p.v1 = 1.5;
  // (cosh t cos s, cosh t sin s, t) with u = s, v = t
  p.immersion = [](double s, double t) {
    return Vec{std::cosh(t) * std::cos(s), std::cosh(t) * std::sin(s), t};
  };
  p.du = [](double s, double t) {
    return Vec{-std::cosh(t) * std::sin(s), std::cosh(t) * std::cos(s), 0.0};
  };
  p.dv = [](double s, double t) {
    return Vec{std::sinh(t) * std::cos(s), std::sinh(t) * std::sin(s), 1.0};
  };
  p.duu = [](double s, double t) {
    return Vec{-std::cosh(t) * std::cos(s), -std::cosh(t) * std::sin(s), 0.0};
  };
  p.duv = [](double s, double t) {
    return Vec{-std::sinh(t) * std::sin(s), std::sinh(t) * std::cos(s), 0.0};
  };
  p.dvv = [](double s, double t) {
    return Vec{std::cosh(t) * std::cos(s), std::cosh(t) * std::sin(s), 0.0};
  };
  return p;
}

SurfacePatch preset_sphere() {
  SurfacePatch p;
  p.ambient = 3;
  p.u0 = 0.0;
  p.u1 = 2.0 * M_PI;  // azimuth
  p.v0 = 0.0;
  p.v1 = M_PI;  // polar angle
  p.immersion = [](double u, double v) {
    return Vec{std::sin(v) * std::cos(u), std::sin(v) * std::sin(u), std::cos(v)};
  };
  p.du = [](double u, double v) {
    return Vec{-std::sin(v) * std::sin(u), std::sin(v) * std::cos(u), 0.0};
  };
  p.dv = [](double u, double v) {
    return Vec{std::cos(v) * std::cos(u), std::cos(v) * std::sin(u), -std::sin(v)};
  };
  p.duu = [](double u, double v) {
    return Vec{-std::sin(v) * std::cos(u), -std::sin(v) * std::sin(u), 0.0};
  };
  p.duv = [](double u, double v) {
    return Vec{-std::cos(v) * std::sin(u), std::cos(v) * std::cos(u), 0.0};
  };
  p.dvv = [](double u, double v) {
    return Vec{-std::sin(v) * std::cos(u), -std::sin(v) * std::sin(u), -std::cos(v)};
  };
  return p;
}

SurfacePatch preset_graph(const std::string& expression) {
  auto f = parse_expression(expression);
  SurfacePatch p;
  p.ambient = 3;
  p.immersion = [f](double u, double v) { return Vec{u, v, f(u, v)}; };
  return p;
}

}  // namespace calibra
