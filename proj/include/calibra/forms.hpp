#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "calibra/errors.hpp"

namespace calibra {

// Central numeric tolerances (single knob for test calibration).
inline constexpr double kOrthoTol = 1e-12;  // plane basis orthonormality
inline constexpr double kRankTol = 1e-10;   // Gram-Schmidt rank threshold

using Vec = std::vector<double>;
using MultiIndex = std::vector<int>;  // entries in 1..n

double dot(const Vec& a, const Vec& b);
double norm(const Vec& v);
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& v);

/// A constant-coefficient k-form on R^n, 1 <= n <= 8, stored densely over the
/// C(n,k) strictly increasing multi-indices in lexicographic order.
class Form {
public:
  // The zero k-form on R^n.  Degrees above n are allowed and carry no
  // coefficients (every wedge that overflows the ambient dimension is zero).
  Form(int n, int k);

  static Form make(int n, int k,
                   const std::vector<std::pair<MultiIndex, double>>& terms);

  int ambient_dim() const { return n_; }
  int degree() const { return k_; }

  // Number of stored coefficients, C(n,k).
  std::size_t term_count() const { return coeffs_.size(); }
  double coeff_at(std::size_t rank) const { return coeffs_[rank]; }
  double& coeff_at(std::size_t rank) { return coeffs_[rank]; }
  MultiIndex index_at(std::size_t rank) const;

  // Coefficient of an arbitrary index list: sorts and applies the sign, so
  // coeff({2,1}) == -coeff({1,2}).  Repeated entries give 0.
  double coeff(const MultiIndex& idx) const;

  Form& operator+=(const Form& other);
  Form& operator-=(const Form& other);
  Form& operator*=(double s);

  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator*(double s, Form a) { return a *= s; }

  bool operator==(const Form& other) const;

  double max_abs_coeff() const;
  double max_abs_diff(const Form& other) const;

private:
  int n_;
  int k_;
  std::vector<double> coeffs_;
};

Form wedge(const Form& a, const Form& b);

// Hodge star for the standard Euclidean metric and orientation dx_1^...^dx_n.
Form hodge_star(const Form& a);

// Interior product v -| a.
Form contract(const Vec& v, const Form& a);

// Antisymmetric multilinear evaluation on degree(a) vectors.
double eval(const Form& a, const std::vector<Vec>& vectors);

// Inner product making the dx_I orthonormal; satisfies a^(*b) = <a,b> vol.
double form_inner(const Form& a, const Form& b);

// Pull a form on R^m to R^n along a strictly increasing injection of
// coordinates: index_map[i-1] is the image of coordinate i (1-based values).
Form relabel_indices(const Form& a, int new_n, const std::vector<int>& index_map);

/// An oriented k-dimensional subspace of R^n, held as an ordered orthonormal
/// basis.  Reversing a basis vector yields a different (opposite) orientation.
struct OrientedPlane {
  int n = 0;
  int k = 0;
  std::vector<Vec> basis;

  // Validates orthonormality to kOrthoTol.
  static OrientedPlane from_orthonormal(int n, std::vector<Vec> basis);
};

// Modified Gram-Schmidt.  Preserves span and orientation; throws RankDeficient
// if the residual norm at any step drops below kRankTol.
OrientedPlane orthonormalize(const std::vector<Vec>& vectors);

OrientedPlane reverse_orientation(OrientedPlane p);

namespace detail {
// Determinant of a dense k x k matrix in row-major order (k <= 8).
double det_small(const double* m, int k);
// Cofactor matrix: cof[r*k+c] = d det(m) / d m[r*k+c].
void cofactor_small(const double* m, int k, double* cof);
std::int64_t binomial(int n, int k);
}  // namespace detail

}  // namespace calibra
