#include "calibra/planes.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "calibra/holonomy.hpp"
#include "calibra/octonion.hpp"

namespace calibra {

namespace {

double clamp_cos(double c) { return std::min(1.0, std::max(-1.0, c)); }

Eigen::MatrixXd inner_matrix(const OrientedPlane& p, const OrientedPlane& q) {
  Eigen::MatrixXd m(p.k, q.k);
  for (int a = 0; a < p.k; ++a)
    for (int b = 0; b < q.k; ++b)
      m(a, b) = dot(p.basis[static_cast<std::size_t>(a)],
                    q.basis[static_cast<std::size_t>(b)]);
  return m;
}

}  // namespace

std::vector<double> principal_angles(const OrientedPlane& p, const OrientedPlane& q) {
  if (p.n != q.n) throw DimMismatch("principal_angles: ambient mismatch");
  if (p.k != q.k) throw DimMismatch("principal_angles: plane dimension mismatch");
  Eigen::MatrixXd m = inner_matrix(p, q);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  std::vector<double> angles(static_cast<std::size_t>(p.k));
  for (int i = 0; i < p.k; ++i)
    angles[static_cast<std::size_t>(i)] = std::acos(clamp_cos(svd.singularValues()(i)));
  std::sort(angles.begin(), angles.end());
  return angles;
}

std::vector<double> characterising_angles(const OrientedPlane& p,
                                          const OrientedPlane& q) {
  if (p.n != q.n) throw DimMismatch("characterising_angles: ambient mismatch");
  if (p.k != q.k) throw DimMismatch("characterising_angles: dimension mismatch");
  if (p.n != 2 * p.k)
    throw NotHalfDim("characterising_angles: ambient must be twice the plane dim");
  Eigen::MatrixXd m = inner_matrix(p, q);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  std::vector<double> angles(static_cast<std::size_t>(p.k));
  for (int i = 0; i < p.k; ++i)
    angles[static_cast<std::size_t>(i)] = std::acos(clamp_cos(svd.singularValues()(i)));
  std::sort(angles.begin(), angles.end());
  if (m.determinant() < 0.0) angles.back() = M_PI - angles.back();
  return angles;
}

std::vector<double> kahler_angles(const OrientedPlane& p) {
  if (p.n % 2 != 0) throw DimMismatch("kahler_angles: ambient must be even");
  if (p.k % 2 != 0) throw DimMismatch("kahler_angles: plane dimension must be even");
  Form omega = kahler_form(p.n / 2);
  Eigen::MatrixXd w(p.k, p.k);
  for (int a = 0; a < p.k; ++a) {
    for (int b = 0; b < p.k; ++b) {
      w(a, b) = eval(omega, {p.basis[static_cast<std::size_t>(a)],
                             p.basis[static_cast<std::size_t>(b)]});
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
  // Singular values of the skew restriction come in equal pairs cos(th_j).
  std::vector<double> angles;
  for (int i = 0; i < p.k; i += 2)
    angles.push_back(std::acos(clamp_cos(svd.singularValues()(i))));
  std::sort(angles.begin(), angles.end());
  return angles;
}

std::string to_string(PlaneLabel label) {
  switch (label) {
    case PlaneLabel::lagrangian: return "lagrangian";
    case PlaneLabel::special_lagrangian: return "special_lagrangian";
    case PlaneLabel::complex_plane: return "complex";
    case PlaneLabel::associative: return "associative";
    case PlaneLabel::coassociative: return "coassociative";
    case PlaneLabel::cayley: return "cayley";
    case PlaneLabel::generic: return "generic";
  }
  return "generic";
}

namespace {

void classify_complex_structures(const OrientedPlane& p, PlaneClass& out) {
  const int m = p.n / 2;
  if (p.k % 2 == 0 && p.k / 2 <= m) {
    const int kc = p.k / 2;
    Form power = kahler_form(m);
    Form acc = power;
    double fact = 1.0;
    for (int i = 1; i < kc; ++i) {
      acc = wedge(acc, power);
      fact *= static_cast<double>(i + 1);
    }
    double value = (kc == 0) ? 1.0 : eval((1.0 / fact) * acc, p.basis);
    out.defects["complex_gap"] = 1.0 - std::abs(value);
  }
  if (p.k == m && m >= 1 && m <= 4) {
    Form omega = kahler_form(m);
    double omega_max = 0.0;
    for (int a = 0; a < p.k; ++a)
      for (int b = a + 1; b < p.k; ++b)
        omega_max = std::max(
            omega_max, std::abs(eval(omega, {p.basis[static_cast<std::size_t>(a)],
                                             p.basis[static_cast<std::size_t>(b)]})));
    double re_u = eval(upsilon_real(m), p.basis);
    double im_u = eval(upsilon_imag(m), p.basis);
    out.defects["omega_restriction"] = omega_max;
    out.defects["im_upsilon"] = std::abs(im_u);
    out.defects["re_upsilon_gap"] = 1.0 - std::abs(re_u);
    out.defects["upsilon_gap"] = 1.0 - std::hypot(re_u, im_u);
    out.phase = std::atan2(im_u, re_u);
  }
}

}  // namespace

PlaneClass classify(const OrientedPlane& p) {
  PlaneClass out;
  bool supported = false;

  if (p.n % 2 == 0) {
    supported = true;
    classify_complex_structures(p, out);
  }
  if (p.n == 7 && p.k == 3) {
    supported = true;
    Vec chi = associator(p.basis[0], p.basis[1], p.basis[2]);
    out.defects["associator"] = norm(chi);
    out.defects["phi_gap"] = 1.0 - std::abs(eval(g2_phi(), p.basis));
  }
  if (p.n == 7 && p.k == 4) {
    supported = true;
    Form phi = g2_phi();
    double restriction = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        for (int c = b + 1; c < 4; ++c)
          restriction = std::max(
              restriction,
              std::abs(eval(phi, {p.basis[static_cast<std::size_t>(a)],
                                  p.basis[static_cast<std::size_t>(b)],
                                  p.basis[static_cast<std::size_t>(c)]})));
    out.defects["phi_restriction"] = restriction;
    out.defects["star_phi_gap"] = 1.0 - std::abs(eval(g2_star_phi(), p.basis));
  }
  if (p.n == 8 && p.k == 4) {
    supported = true;
    out.defects["tau"] =
        tau_norm(oct_from_r8(p.basis[0]), oct_from_r8(p.basis[1]),
                 oct_from_r8(p.basis[2]), oct_from_r8(p.basis[3]));
    out.defects["cayley_gap"] = 1.0 - std::abs(eval(spin7_phi(), p.basis));
  }
  if (!supported)
    throw UnsupportedAmbient("classify: no plane conditions in this ambient dim");

  auto defect_below = [&](const char* key) {
    auto it = out.defects.find(key);
    return it != out.defects.end() && it->second < kClassTol;
  };

  // Most specific label wins: complex and special Lagrangian planes are in
  // particular Cayley when n = 8.
  if (defect_below("complex_gap") && p.k > 0) {
    out.label = PlaneLabel::complex_plane;
  } else if (defect_below("omega_restriction")) {
    out.label = defect_below("upsilon_gap") ? PlaneLabel::special_lagrangian
                                            : PlaneLabel::lagrangian;
  } else if (defect_below("associator")) {
    out.label = PlaneLabel::associative;
  } else if (defect_below("phi_restriction")) {
    out.label = PlaneLabel::coassociative;
  } else if (defect_below("tau")) {
    out.label = PlaneLabel::cayley;
  } else {
    out.label = PlaneLabel::generic;
  }
  return out;
}

OrientedPlane slag_plane(const std::vector<double>& theta) {
  const int n = static_cast<int>(theta.size());
  if (n < 1 || n > 4) throw UnsupportedDim("slag_plane: n must be in [1,4]");
  std::vector<Vec> basis;
  for (int j = 0; j < n; ++j) {
    Vec v(static_cast<std::size_t>(2 * n), 0.0);
    v[static_cast<std::size_t>(2 * j)] = std::cos(theta[static_cast<std::size_t>(j)]);
    v[static_cast<std::size_t>(2 * j + 1)] = std::sin(theta[static_cast<std::size_t>(j)]);
    basis.push_back(std::move(v));
  }
  return OrientedPlane::from_orthonormal(2 * n, std::move(basis));
}

}  // namespace calibra
