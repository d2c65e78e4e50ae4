#pragma once

#include <vector>

#include "calibra/forms.hpp"

namespace calibra {

/// Neck parameters a_j = c_j^{-2} > 0; n = a.size() in [2,4].
struct LawlorParams {
  std::vector<double> a;
  int n() const { return static_cast<int>(a.size()); }
};

/// The angle integrals th_j(t) = int_0^t a_j ds / ((1 + a_j s^2)
/// sqrt((prod_k(1 + a_k s^2) - 1)/s^2)), by adaptive Gauss-Kronrod quadrature
/// to absolute tolerance 1e-10; odd in t by construction.
std::vector<double> lawlor_angles(const LawlorParams& p, double t);

/// th_j(inf); the tail beyond the cutoff is integrated exactly under the
/// substitution s -> 1/s.  The sum is pi/2.
std::vector<double> lawlor_asymptotic(const LawlorParams& p);

/// Invert psi = 2 th(inf): Newton with central-difference Jacobian from the
/// symmetric guess, scale fixed by a_1 = 1.  Requires psi_j in (0,pi) and
/// sum psi = pi within 1e-10.
LawlorParams lawlor_solve(const std::vector<double>& psi);

struct NeckSample {
  Vec point;             // in R^{2n}, interleaved complex coordinates
  OrientedPlane tangent; // oriented n-dimensional tangent plane
  double t = 0.0;        // profile parameter (u = t^2)
  std::vector<double> dir;  // point on S^{n-1}
};

/// Sample points (dir_1 z_1(t), ..., dir_n z_n(t)) with analytic tangent
/// frames; directions from a low-discrepancy sequence on the sphere.
std::vector<NeckSample> lawlor_sample(const LawlorParams& p,
                                      const std::vector<double>& t_values,
                                      int directions);

struct SlagDefect {
  double omega_max = 0.0;      // max |omega(b_i, b_j)| over tangent pairs
  double re_upsilon = 0.0;     // |Re Upsilon| on the tangent frame
  double im_upsilon_gap = 0.0; // |1 - Im Upsilon| after orienting Im >= 0
};

SlagDefect slag_defect(const NeckSample& sample);

/// Relative defect of the phase-i special Lagrangian ODE
/// conj(z_j) z_j' = i f conj(z_1...z_n) with a common positive factor f
/// (the f_j = 1 normalization up to reparametrization speed).
double lawlor_ode_residual(const LawlorParams& p, double t);

}  // namespace calibra
