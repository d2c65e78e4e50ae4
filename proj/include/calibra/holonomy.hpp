#pragma once

#include <cstdint>
#include <string>

#include "calibra/forms.hpp"

namespace calibra {

// Complex coordinates on C^n inside R^{2n} are interleaved:
// z_j = x_{2j-1} + i x_{2j}.  The R^7 = R x C^3 splitting instead uses the
// convention z_j = x_{2j} + i x_{2j+1} with x_1 the real direction; the
// relabeling between the two is an explicit index map (see r7_embedding).

/// Kahler form on C^n (a 2-form on R^{2n}), n in [1,4].
Form kahler_form(int n);

/// Re and Im of the holomorphic volume form dz_1 ^ ... ^ dz_n on C^n.
Form upsilon_real(int n);
Form upsilon_imag(int n);

/// Re(e^{-i theta} Upsilon) = cos(theta) Re(Upsilon) + sin(theta) Im(Upsilon).
Form slag_calibration(int n, double theta);

/// The G2 3-form, its Hodge dual 4-form, and the Spin(7) 4-form, in the
/// coordinates fixed above.
Form g2_phi();
Form g2_star_phi();
Form spin7_phi();

/// Index map embedding C^3 (coordinates 1..6 of R^6) into the last six
/// coordinates of R^7, matching the R x C^3 splitting.
std::vector<int> r7_embedding();

struct StructureTag {
  enum class Kind { kahler, slag_real, slag_imag, g2_phi, g2_star_phi, spin7_phi };
  Kind kind;
  int n = 0;          // complex dimension, for the complex structures
  double theta = 0.0;  // phase, for slag_real
};

Form standard_form(const StructureTag& tag);

/// Orthogonal projection of a 2-form on R^8 onto the 7-dimensional module
/// spanned by u^v + Phi(u,v,.,.).  The defining eigenvalue of beta -> *(Phi^beta)
/// is measured from these generators at startup rather than hard-coded.
Form lambda27_project(const Form& beta);

/// Exact rational p/q, normalized with q > 0.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d);
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  std::string str() const;
};

/// sigma/2 + chi/2 - self_int, exactly.  Plain arithmetic on integers; no
/// manifold-level validation of the inputs.
Rational cayley_index(std::int64_t sigma, std::int64_t euler, std::int64_t self_int);

}  // namespace calibra
