#pragma once

#include <map>
#include <string>
#include <vector>

#include "calibra/forms.hpp"

namespace calibra {

inline constexpr double kClassTol = 1e-8;  // classification defect threshold

/// Principal angles between equal-dimensional subspaces: arccos of the
/// singular values of the basis inner-product matrix, sorted ascending.
/// Orientation-independent.
std::vector<double> principal_angles(const OrientedPlane& p, const OrientedPlane& q);

/// Oriented refinement for n-planes in R^{2n}: the first n-1 angles are the
/// principal angles in [0, pi/2]; the sign of det of the inner-product matrix
/// decides whether the last is theta_n or pi - theta_n, so that the canonical
/// frame with 0 <= th_1 <= ... <= th_{n-1} <= pi/2, th_{n-1} <= th_n <= pi - th_{n-1}
/// exists.  Ties through a zero determinant keep the unflipped angle; that
/// convention is ours, the degenerate case is not pinned down elsewhere.
std::vector<double> characterising_angles(const OrientedPlane& p,
                                          const OrientedPlane& q);

/// Kahler angles of a 2k-plane in R^{2n}: arccos of the paired singular
/// values of the restriction of the Kahler form to the plane.
std::vector<double> kahler_angles(const OrientedPlane& p);

enum class PlaneLabel {
  lagrangian,
  special_lagrangian,
  complex_plane,
  associative,
  coassociative,
  cayley,
  generic,
};

std::string to_string(PlaneLabel label);

struct PlaneClass {
  PlaneLabel label = PlaneLabel::generic;
  double phase = 0.0;  // special Lagrangian phase, when labeled
  std::map<std::string, double> defects;
};

/// Runs every plane condition the ambient dimension supports and returns all
/// defects along with the winning label (most specific condition below
/// kClassTol).  Calibration-value defects use |.|, so they are orientation
/// stable; the slag phase is reported for the given orientation.
PlaneClass classify(const OrientedPlane& p);

/// P(theta): basis vectors cos(th_j) dx_j + sin(th_j) dy_j in the interleaved
/// convention on C^n.
OrientedPlane slag_plane(const std::vector<double>& theta);

}  // namespace calibra
