#pragma once

#include <array>
#include <string>

#include "calibra/forms.hpp"

namespace calibra {

// The octonion product is derived from the G2 3-form rather than from a fixed
// multiplication table: e_i e_j = -delta_ij + sum_k phi(e_i,e_j,e_k) e_k.
// R^8 is identified with O by x_1 <-> 1 and x_{i+1} <-> e_i.

struct Octonion {
  double re = 0.0;
  std::array<double, 7> im{};

  static Octonion one() { return Octonion{1.0, {}}; }
  static Octonion unit_im(int i);  // e_i, i in 1..7
};

Octonion operator+(const Octonion& a, const Octonion& b);
Octonion operator-(const Octonion& a, const Octonion& b);
Octonion operator*(double s, const Octonion& a);

Octonion oct_mul(const Octonion& a, const Octonion& b);
Octonion oct_conj(const Octonion& a);
double oct_norm(const Octonion& a);
double oct_inner(const Octonion& a, const Octonion& b);

Octonion oct_from_r8(const Vec& v);  // v has 8 components
Vec oct_to_r8(const Octonion& a);

/// The vector with <cross7(u,v), w> = phi(u,v,w) for all w.
Vec cross7(const Vec& u, const Vec& v);

/// Imaginary part of u(vw) - (uv)w for imaginary u,v,w (the real part
/// vanishes identically and is checked).
Vec associator(const Vec& u, const Vec& v, const Vec& w);

/// The triple cross product of the form 1/2 (a (conj(b) c) - c (conj(b) a));
/// the argument order and sign are fixed once by requiring that
/// <triple_cross(x,y,z), w> equals the Spin(7) form on coordinate frames, so
/// {x, y, z, triple_cross(x,y,z)} completes any orthonormal triple to a
/// Cayley frame.
Octonion triple_cross(const Octonion& x, const Octonion& y, const Octonion& z);

/// The fourfold cross product: re gives the Spin(7) form on orthonormal
/// frames, im is the tau obstruction.  The exact composition is fixed once by
/// an exhaustive search over candidates built from the triple cross (see
/// fourfold_convention()).
Octonion fourfold(const Octonion& x, const Octonion& y, const Octonion& z,
                  const Octonion& w);

double tau_norm(const Octonion& x, const Octonion& y, const Octonion& z,
                const Octonion& w);

struct FourfoldConvention {
  std::string description;      // human-readable formula of the chosen candidate
  int matched_candidates = 0;   // candidates reproducing Phi on all 70 frames
  int survivors = 0;            // remaining after the frame-order consistency filter
};

/// Runs the search on first use; throws ConventionUnresolved if no candidate
/// reproduces the 14-term Spin(7) form on all 70 coordinate 4-frames.
const FourfoldConvention& fourfold_convention();

struct Quaternion {
  double re = 0.0;
  std::array<double, 3> im{};
};

Quaternion quat_mul(const Quaternion& a, const Quaternion& b);
Quaternion quat_conj(const Quaternion& a);
double quat_norm(const Quaternion& a);

}  // namespace calibra
