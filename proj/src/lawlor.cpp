#include "calibra/lawlor.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "calibra/holonomy.hpp"

namespace calibra {

namespace {

// 7/15 Gauss-Kronrod pair (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767,
                           0.3818300505051189, 0.4179591836734694};

struct PanelResult {
  double integral;
  double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  double ik = kWgk[7] * fc;
  double ig = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    double x = h * kXgk[i];
    double fsum = f(c - x) + f(c + x);
    ik += kWgk[i] * fsum;
    if (i % 2 == 1) ig += kWg[i / 2] * fsum;
  }
  double integral = ik * h;
  double err = std::abs((ik - ig) * h);
  return {integral, err};
}

double adaptive(const std::function<double(double)>& f, double a, double b,
                double tol, int depth, double* achieved) {
  PanelResult r = gk15(f, a, b);
  if (r.error <= tol || depth >= 48) {
    if (depth >= 48 && r.error > tol) *achieved += r.error;
    return r.integral;
  }
  double mid = 0.5 * (a + b);
  return adaptive(f, a, mid, 0.5 * tol, depth + 1, achieved) +
         adaptive(f, mid, b, 0.5 * tol, depth + 1, achieved);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  if (a == b) return 0.0;
  double achieved = 0.0;
  double value = adaptive(f, a, b, tol, 0, &achieved);
  if (achieved > tol)
    throw QuadratureFailure("quadrature: tolerance not met, achieved error " +
                            std::to_string(achieved));
  return value;
}

void check_params(const LawlorParams& p) {
  if (p.n() < 2 || p.n() > 4)
    throw UnsupportedDim("lawlor: n must be in [2,4]");
  for (double a : p.a) {
    if (!(a > 0.0)) throw PreconditionViolated("lawlor: a_j must be positive");
  }
}

// (prod_k (1 + a_k s^2) - 1) / s^2, continued through the removable
// singularity at s = 0 (limit: sum a_k).
double radial_factor(const std::vector<double>& a, double s) {
  double s2 = s * s;
  if (s2 < 1e-30) {
    double sum = 0.0;
    for (double v : a) sum += v;
    return sum;
  }
  double logs = 0.0;
  for (double v : a) logs += std::log1p(v * s2);
  return std::expm1(logs) / s2;
}

double integrand(const std::vector<double>& a, int j, double s) {
  double g = radial_factor(a, s);
  return a[static_cast<std::size_t>(j)] /
         ((1.0 + a[static_cast<std::size_t>(j)] * s * s) * std::sqrt(g));
}

// Integrand of the tail under s -> 1/r:
// int_T^inf f ds = int_0^{1/T} a_j r^{n-1} / ((r^2 + a_j) sqrt(prod(r^2+a_k) - r^{2n})) dr.
double tail_integrand(const std::vector<double>& a, int j, double r) {
  const int n = static_cast<int>(a.size());
  double r2 = r * r;
  double prod = 1.0;
  for (double v : a) prod *= r2 + v;
  double num = prod - std::pow(r2, n);
  double rpow = std::pow(r, n - 1);
  return a[static_cast<std::size_t>(j)] * rpow /
         ((r2 + a[static_cast<std::size_t>(j)]) * std::sqrt(num));
}

}  // namespace

std::vector<double> lawlor_angles(const LawlorParams& p, double t) {
  check_params(p);
  if (!std::isfinite(t)) throw PreconditionViolated("lawlor_angles: t must be finite");
  const int n = p.n();
  std::vector<double> theta(static_cast<std::size_t>(n), 0.0);
  double sign = (t < 0.0) ? -1.0 : 1.0;
  double limit = std::abs(t);
  if (limit == 0.0) return theta;
  for (int j = 0; j < n; ++j) {
    auto f = [&](double s) { return integrand(p.a, j, s); };
    theta[static_cast<std::size_t>(j)] = sign * integrate(f, 0.0, limit, 1e-10);
  }
  return theta;
}

std::vector<double> lawlor_asymptotic(const LawlorParams& p) {
  check_params(p);
  const int n = p.n();
  double amin = *std::min_element(p.a.begin(), p.a.end());
  const double cutoff = 10.0 * std::max(1.0, 1.0 / std::sqrt(amin));
  std::vector<double> theta(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    auto head = [&](double s) { return integrand(p.a, j, s); };
    auto tail = [&](double r) { return tail_integrand(p.a, j, r); };
    theta[static_cast<std::size_t>(j)] =
        integrate(head, 0.0, cutoff, 5e-11) +
        integrate(tail, 0.0, 1.0 / cutoff, 5e-11);
  }
  return theta;
}

LawlorParams lawlor_solve(const std::vector<double>& psi) {
  const int n = static_cast<int>(psi.size());
  if (n < 2 || n > 4) throw UnsupportedDim("lawlor_solve: n must be in [2,4]");
  double sum = 0.0;
  for (double v : psi) {
    if (!(v > 0.0) || !(v < M_PI))
      throw PreconditionViolated("lawlor_solve: psi_j must lie in (0,pi)");
    sum += v;
  }
  if (std::abs(sum - M_PI) > 1e-10)
    throw PreconditionViolated("lawlor_solve: sum psi must equal pi");

  // Unknowns x_j = log a_j for j = 2..n; a_1 = 1 fixes the dilation scale.
  // The closure sum 2 th(inf) = pi makes the first equation redundant.
  const int m = n - 1;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  auto params_of = [&](const Eigen::VectorXd& v) {
    LawlorParams p;
    p.a.assign(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i < m; ++i) p.a[static_cast<std::size_t>(i + 1)] = std::exp(v(i));
    return p;
  };
  auto residual_full = [&](const Eigen::VectorXd& v) {
    std::vector<double> th = lawlor_asymptotic(params_of(v));
    Eigen::VectorXd r(n);
    for (int j = 0; j < n; ++j)
      r(j) = 2.0 * th[static_cast<std::size_t>(j)] - psi[static_cast<std::size_t>(j)];
    return r;
  };

  Eigen::VectorXd r = residual_full(x);
  double best = r.cwiseAbs().maxCoeff();
  for (int iter = 0; iter < 100; ++iter) {
    if (best < 1e-9) {
      LawlorParams p = params_of(x);
      return p;
    }
    Eigen::MatrixXd jac(m, m);
    for (int c = 0; c < m; ++c) {
      double step = 1e-6 * std::max(1.0, std::abs(x(c)));
      Eigen::VectorXd xp = x, xm = x;
      xp(c) += step;
      xm(c) -= step;
      Eigen::VectorXd rp = residual_full(xp), rm = residual_full(xm);
      for (int row = 0; row < m; ++row)
        jac(row, c) = (rp(row + 1) - rm(row + 1)) / (2.0 * step);
    }
    Eigen::VectorXd rhs(m);
    for (int row = 0; row < m; ++row) rhs(row) = -r(row + 1);
    Eigen::VectorXd delta = jac.colPivHouseholderQr().solve(rhs);
    double scale = 1.0;
    for (int back = 0; back < 20; ++back) {
      Eigen::VectorXd xt = x + scale * delta;
      Eigen::VectorXd rt = residual_full(xt);
      double nt = rt.cwiseAbs().maxCoeff();
      if (nt < best) {
        x = xt;
        r = rt;
        best = nt;
        break;
      }
      scale *= 0.5;
      if (back == 19) {
        throw NoConvergence("lawlor_solve: line search stalled", best);
      }
    }
  }
  if (best < 1e-9) return params_of(x);
  throw NoConvergence("lawlor_solve: no convergence after 100 iterations", best);
}

namespace {

// Kronecker low-discrepancy point in [0,1)^d.
void kronecker(int k, int d, double* out) {
  static const double alpha[3] = {0.41421356237309515,   // sqrt(2) - 1
                                  0.7320508075688772,    // sqrt(3) - 1
                                  0.23606797749978969};  // sqrt(5) - 2
  for (int i = 0; i < d; ++i) {
    double v = 0.5 + (k + 1) * alpha[i];
    out[i] = v - std::floor(v);
  }
}

std::vector<double> sphere_direction(int k, int n) {
  double u[3];
  std::vector<double> dir(static_cast<std::size_t>(n));
  switch (n) {
    case 2: {
      kronecker(k, 1, u);
      double phi = 2.0 * M_PI * u[0];
      dir[0] = std::cos(phi);
      dir[1] = std::sin(phi);
      break;
    }
    case 3: {
      kronecker(k, 2, u);
      double z = 2.0 * u[0] - 1.0;
      double phi = 2.0 * M_PI * u[1];
      double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      dir[0] = s * std::cos(phi);
      dir[1] = s * std::sin(phi);
      dir[2] = z;
      break;
    }
    default: {  // n == 4, uniform on S^3
      kronecker(k, 3, u);
      double s1 = std::sqrt(1.0 - u[0]), s2 = std::sqrt(u[0]);
      dir[0] = s1 * std::sin(2.0 * M_PI * u[1]);
      dir[1] = s1 * std::cos(2.0 * M_PI * u[1]);
      dir[2] = s2 * std::sin(2.0 * M_PI * u[2]);
      dir[3] = s2 * std::cos(2.0 * M_PI * u[2]);
      break;
    }
  }
  return dir;
}

struct Profile {
  std::vector<std::complex<double>> z;   // z_j(t)
  std::vector<std::complex<double>> dz;  // dz_j/dt
};

Profile profile_at(const LawlorParams& p, double t) {
  const int n = p.n();
  std::vector<double> theta = lawlor_angles(p, t);
  Profile pr;
  pr.z.resize(static_cast<std::size_t>(n));
  pr.dz.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double aj = p.a[static_cast<std::size_t>(j)];
    double cj = 1.0 / std::sqrt(aj);
    double rj = std::sqrt(cj * cj + t * t);
    std::complex<double> phase =
        std::polar(1.0, theta[static_cast<std::size_t>(j)]);
    pr.z[static_cast<std::size_t>(j)] = rj * phase;
    double drdt = t / rj;
    double dthdt = integrand(p.a, j, std::abs(t));  // even in t
    pr.dz[static_cast<std::size_t>(j)] =
        (std::complex<double>(drdt, rj * dthdt)) * phase;
  }
  return pr;
}

}  // namespace

std::vector<NeckSample> lawlor_sample(const LawlorParams& p,
                                      const std::vector<double>& t_values,
                                      int directions) {
  check_params(p);
  if (directions < 1)
    throw PreconditionViolated("lawlor_sample: directions must be >= 1");
  const int n = p.n();
  std::vector<NeckSample> samples;
  samples.reserve(t_values.size() * static_cast<std::size_t>(directions));
  for (double t : t_values) {
    Profile pr = profile_at(p, t);
    for (int d = 0; d < directions; ++d) {
      std::vector<double> dir = sphere_direction(d, n);
      NeckSample s;
      s.t = t;
      s.dir = dir;
      s.point.assign(static_cast<std::size_t>(2 * n), 0.0);
      for (int j = 0; j < n; ++j) {
        std::complex<double> zj = dir[static_cast<std::size_t>(j)] * pr.z[static_cast<std::size_t>(j)];
        s.point[static_cast<std::size_t>(2 * j)] = zj.real();
        s.point[static_cast<std::size_t>(2 * j + 1)] = zj.imag();
      }
      // Tangents: the profile direction and an orthonormal basis of dir^perp
      // pushed through z.
      std::vector<Vec> tangents;
      Vec tt(static_cast<std::size_t>(2 * n));
      for (int j = 0; j < n; ++j) {
        std::complex<double> v = dir[static_cast<std::size_t>(j)] * pr.dz[static_cast<std::size_t>(j)];
        tt[static_cast<std::size_t>(2 * j)] = v.real();
        tt[static_cast<std::size_t>(2 * j + 1)] = v.imag();
      }
      tangents.push_back(std::move(tt));
      // Gram-Schmidt coordinate seeds against dir.
      std::vector<Vec> sphere_basis;
      for (int seed = 0; seed < n && static_cast<int>(sphere_basis.size()) < n - 1; ++seed) {
        Vec cand(static_cast<std::size_t>(n), 0.0);
        cand[static_cast<std::size_t>(seed)] = 1.0;
        double pd = 0.0;
        for (int j = 0; j < n; ++j) pd += cand[static_cast<std::size_t>(j)] * dir[static_cast<std::size_t>(j)];
        for (int j = 0; j < n; ++j) cand[static_cast<std::size_t>(j)] -= pd * dir[static_cast<std::size_t>(j)];
        for (const Vec& b : sphere_basis) {
          double q = dot(cand, b);
          for (int j = 0; j < n; ++j) cand[static_cast<std::size_t>(j)] -= q * b[static_cast<std::size_t>(j)];
        }
        double len = norm(cand);
        if (len < 1e-8) continue;
        for (double& x : cand) x /= len;
        sphere_basis.push_back(std::move(cand));
      }
      for (const Vec& sb : sphere_basis) {
        Vec tv(static_cast<std::size_t>(2 * n));
        for (int j = 0; j < n; ++j) {
          std::complex<double> v = sb[static_cast<std::size_t>(j)] * pr.z[static_cast<std::size_t>(j)];
          tv[static_cast<std::size_t>(2 * j)] = v.real();
          tv[static_cast<std::size_t>(2 * j + 1)] = v.imag();
        }
        tangents.push_back(std::move(tv));
      }
      s.tangent = orthonormalize(tangents);
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

SlagDefect slag_defect(const NeckSample& sample) {
  const int n2 = sample.tangent.n;
  if (n2 % 2 != 0) throw DimMismatch("slag_defect: ambient must be even");
  const int n = n2 / 2;
  Form omega = kahler_form(n);
  std::vector<Vec> basis = sample.tangent.basis;
  SlagDefect d;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j)
      d.omega_max = std::max(d.omega_max, std::abs(eval(omega, {basis[i], basis[j]})));
  double re = eval(upsilon_real(n), basis);
  double im = eval(upsilon_imag(n), basis);
  if (im < 0.0) {
    re = -re;
    im = -im;
  }
  d.re_upsilon = std::abs(re);
  d.im_upsilon_gap = std::abs(1.0 - im);
  return d;
}

double lawlor_ode_residual(const LawlorParams& p, double t) {
  check_params(p);
  Profile pr = profile_at(p, t);
  const int n = p.n();
  std::complex<double> prod(1.0, 0.0);
  for (int j = 0; j < n; ++j) prod *= pr.z[static_cast<std::size_t>(j)];
  std::complex<double> rhs = std::complex<double>(0.0, 1.0) * std::conj(prod);
  double lambda = 0.0;
  std::vector<std::complex<double>> lhs(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    lhs[static_cast<std::size_t>(j)] =
        std::conj(pr.z[static_cast<std::size_t>(j)]) * pr.dz[static_cast<std::size_t>(j)];
    lambda += (lhs[static_cast<std::size_t>(j)] / rhs).real();
  }
  lambda /= n;
  if (!(lambda > 0.0))
    throw PreconditionViolated("lawlor_ode_residual: nonpositive speed factor");
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    double dev = std::abs(lhs[static_cast<std::size_t>(j)] - lambda * rhs) /
                 std::max(1e-300, std::abs(lhs[static_cast<std::size_t>(j)]));
    worst = std::max(worst, dev);
  }
  return worst;
}

}  // namespace calibra
