#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "calibra/forms.hpp"
#include "calibra/octonion.hpp"

namespace calibra {

inline constexpr double kAngleTol = 1e-9;  // for the psi-sum >= pi comparison

struct ComassReport {
  double value = 0.0;
  OrientedPlane argmax;
  int starts = 0;
  double converged_fraction = 0.0;
};

/// Multistart projected-gradient ascent of eval(form, frame) over orthonormal
/// k-frames.  Deterministic for a fixed seed regardless of thread count: each
/// start derives its own RNG stream and the reduction is by (value, frame).
ComassReport comass(const Form& form, int starts, std::uint64_t seed,
                    int threads = 1);

/// Max over the torus of Re prod_j (cos t_j + sin t_j u_j) for unit imaginary
/// quaternions u_j; dense grid (64 per axis for n <= 3, 32 for n = 4) plus
/// gradient refinement from the best cells.
double torus_form_max(const std::vector<std::array<double, 3>>& u);

struct NanceWitness {
  std::vector<std::array<double, 3>> polygon;  // points w_j on S^2
  std::vector<std::array<double, 3>> u;        // unit imaginary quaternions
  Form eta = Form(1, 0);                       // the calibration on R^{2n}
};

struct AngleReport {
  std::vector<double> theta;  // characterising angles of (P, Q)
  std::vector<double> psi;    // characterising angles of (P, -Q)
  double psi_sum = 0.0;
  bool minimizing = false;
  bool boundary = false;  // |psi_sum - pi| <= kAngleTol
  std::optional<NanceWitness> witness;
};

/// The Angle Theorem decision: P u Q is volume-minimizing iff the
/// characterising angles of (P, -Q) sum to at least pi.  With want_witness,
/// a Nance calibration is attempted for minimizing pairs.
AngleReport angle_theorem(const OrientedPlane& p, const OrientedPlane& q,
                          bool want_witness);

/// n points on the unit sphere with geodesic distances d(w_j, w_{j+1}) = th_j
/// (cyclically), constructed on a common circumscribed circle; w_1 is rotated
/// to (0,0,1) and the polygon advances with positive azimuth.
std::vector<std::array<double, 3>> spherical_polygon(const std::vector<double>& theta);

/// Constructive calibration witness for the plane pair (R^n, P(theta)):
/// u_j from the quaternion products w_j conj(w_{j+1}) of the spherical
/// polygon, eta = Re((dx_1 + u_1 dy_1) ^ ... ^ (dx_n + u_n dy_n)).
NanceWitness nance_witness(const std::vector<double>& theta);

}  // namespace calibra
