#include "calibra/holonomy.hpp"

#include <cmath>
#include <mutex>
#include <numeric>
#include <random>

#include <Eigen/Dense>

namespace calibra {

namespace {

// Expand prod_j (dx_{2j-1} + i dx_{2j}); keep terms whose number of imaginary
// picks is even (real part) or odd (imaginary part).  Factor j contributes
// coordinate 2j-1 or 2j, so index tuples come out already sorted.
Form upsilon_part(int n, bool real_part) {
  if (n < 1 || n > 4) throw UnsupportedDim("upsilon: n must be in [1,4]");
  std::vector<std::pair<MultiIndex, double>> terms;
  for (int mask = 0; mask < (1 << n); ++mask) {
    int picks = 0;
    MultiIndex idx(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      bool imag = (mask >> j) & 1;
      if (imag) ++picks;
      idx[static_cast<std::size_t>(j)] = 2 * j + (imag ? 2 : 1);
    }
    // i^picks = (+1, +i, -1, -i, ...)
    if (real_part && picks % 2 == 0) {
      terms.emplace_back(idx, (picks % 4 == 0) ? 1.0 : -1.0);
    } else if (!real_part && picks % 2 == 1) {
      terms.emplace_back(idx, (picks % 4 == 1) ? 1.0 : -1.0);
    }
  }
  return Form::make(2 * n, n, terms);
}

}  // namespace

Form kahler_form(int n) {
  if (n < 1 || n > 4) throw UnsupportedDim("kahler_form: n must be in [1,4]");
  std::vector<std::pair<MultiIndex, double>> terms;
  for (int j = 1; j <= n; ++j) terms.push_back({{2 * j - 1, 2 * j}, 1.0});
  return Form::make(2 * n, 2, terms);
}

Form upsilon_real(int n) { return upsilon_part(n, true); }
Form upsilon_imag(int n) { return upsilon_part(n, false); }

Form slag_calibration(int n, double theta) {
  return std::cos(theta) * upsilon_real(n) + std::sin(theta) * upsilon_imag(n);
}

Form g2_phi() {
  return Form::make(7, 3,
                    {{{1, 2, 3}, 1.0},
                     {{1, 4, 5}, 1.0},
                     {{1, 6, 7}, 1.0},
                     {{2, 4, 6}, 1.0},
                     {{2, 5, 7}, -1.0},
                     {{3, 4, 7}, -1.0},
                     {{3, 5, 6}, -1.0}});
}

Form g2_star_phi() {
  return Form::make(7, 4,
                    {{{4, 5, 6, 7}, 1.0},
                     {{2, 3, 6, 7}, 1.0},
                     {{2, 3, 4, 5}, 1.0},
                     {{1, 3, 5, 7}, 1.0},
                     {{1, 3, 4, 6}, -1.0},
                     {{1, 2, 5, 6}, -1.0},
                     {{1, 2, 4, 7}, -1.0}});
}

Form spin7_phi() {
  // Equivalently 1/2 omega^2 + Re Upsilon on C^4, and dx_1 ^ phi + *phi under
  // R^8 = R x R^7; both splittings are enforced coefficient-exactly in tests.
  return Form::make(8, 4,
                    {{{1, 2, 3, 4}, 1.0},
                     {{1, 2, 5, 6}, 1.0},
                     {{1, 2, 7, 8}, 1.0},
                     {{1, 3, 5, 7}, 1.0},
                     {{1, 3, 6, 8}, -1.0},
                     {{1, 4, 5, 8}, -1.0},
                     {{1, 4, 6, 7}, -1.0},
                     {{5, 6, 7, 8}, 1.0},
                     {{3, 4, 7, 8}, 1.0},
                     {{3, 4, 5, 6}, 1.0},
                     {{2, 4, 6, 8}, 1.0},
                     {{2, 4, 5, 7}, -1.0},
                     {{2, 3, 6, 7}, -1.0},
                     {{2, 3, 5, 8}, -1.0}});
}

std::vector<int> r7_embedding() { return {2, 3, 4, 5, 6, 7}; }

Form standard_form(const StructureTag& tag) {
  switch (tag.kind) {
    case StructureTag::Kind::kahler:
      return kahler_form(tag.n);
    case StructureTag::Kind::slag_real:
      return slag_calibration(tag.n, tag.theta);
    case StructureTag::Kind::slag_imag:
      return upsilon_imag(tag.n);
    case StructureTag::Kind::g2_phi:
      return g2_phi();
    case StructureTag::Kind::g2_star_phi:
      return g2_star_phi();
    case StructureTag::Kind::spin7_phi:
      return spin7_phi();
  }
  throw UnsupportedDim("standard_form: unknown tag");
}

namespace {

Form two_form_generator(const Vec& u, const Vec& v, const Form& phi) {
  // u ^ v as a 2-form plus the double contraction Phi(u, v, ., .).
  std::vector<std::pair<MultiIndex, double>> terms;
  for (int i = 1; i <= 8; ++i) {
    for (int j = i + 1; j <= 8; ++j) {
      double c = u[static_cast<std::size_t>(i - 1)] * v[static_cast<std::size_t>(j - 1)] -
                 u[static_cast<std::size_t>(j - 1)] * v[static_cast<std::size_t>(i - 1)];
      if (c != 0.0) terms.push_back({{i, j}, c});
    }
  }
  Form uv = Form::make(8, 2, terms);
  return uv + contract(v, contract(u, phi));
}

struct Lambda27Operator {
  Eigen::Matrix<double, 28, 28> projector;

  Lambda27Operator() {
    Form phi = spin7_phi();
    // Matrix of T: beta -> *(Phi ^ beta) in the dx_I basis of 2-forms.
    Eigen::Matrix<double, 28, 28> t;
    for (int c = 0; c < 28; ++c) {
      Form basis(8, 2);
      basis.coeff_at(static_cast<std::size_t>(c)) = 1.0;
      Form image = hodge_star(wedge(phi, basis));
      for (int r = 0; r < 28; ++r) t(r, c) = image.coeff_at(static_cast<std::size_t>(r));
    }
    // Measure the eigenvalue on the generators u ^ v + Phi(u,v,.,.) rather
    // than hard-coding it (it flips with the orientation convention).
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> gauss;
    double lambda7 = 0.0;
    bool have = false;
    for (int trial = 0; trial < 8; ++trial) {
      Vec u(8), v(8);
      for (auto& x : u) x = gauss(rng);
      for (auto& x : v) x = gauss(rng);
      Form g = two_form_generator(u, v, phi);
      Eigen::Matrix<double, 28, 1> gv;
      for (int r = 0; r < 28; ++r) gv(r) = g.coeff_at(static_cast<std::size_t>(r));
      double gg = gv.squaredNorm();
      if (gg < 1e-8) continue;
      Eigen::Matrix<double, 28, 1> tg = t * gv;
      double lambda = gv.dot(tg) / gg;
      if ((tg - lambda * gv).norm() > 1e-8 * std::sqrt(gg))
        throw ConventionUnresolved(
            "lambda27: generator is not an eigenvector of *(Phi ^ .)");
      if (have && std::abs(lambda - lambda7) > 1e-9)
        throw ConventionUnresolved("lambda27: inconsistent generator eigenvalue");
      lambda7 = lambda;
      have = true;
    }
    if (!have) throw ConventionUnresolved("lambda27: no usable generator");
    // T has two eigenvalues; the complement one follows from the trace.
    double lambda21 = (t.trace() - 7.0 * lambda7) / 21.0;
    projector = (t - lambda21 * Eigen::Matrix<double, 28, 28>::Identity()) /
                (lambda7 - lambda21);
  }
};

const Lambda27Operator& lambda27_operator() {
  static const Lambda27Operator op;
  return op;
}

}  // namespace

Form lambda27_project(const Form& beta) {
  if (beta.ambient_dim() != 8 || beta.degree() != 2)
    throw DegreeMismatch("lambda27_project: expects a 2-form on R^8");
  const auto& op = lambda27_operator();
  Eigen::Matrix<double, 28, 1> b;
  for (int r = 0; r < 28; ++r) b(r) = beta.coeff_at(static_cast<std::size_t>(r));
  Eigen::Matrix<double, 28, 1> p = op.projector * b;
  Form out(8, 2);
  for (int r = 0; r < 28; ++r) out.coeff_at(static_cast<std::size_t>(r)) = p(r);
  return out;
}

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (den == 0) throw IndexOutOfRange("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational cayley_index(std::int64_t sigma, std::int64_t euler, std::int64_t self_int) {
  return Rational(sigma + euler - 2 * self_int, 2);
}

}  // namespace calibra
