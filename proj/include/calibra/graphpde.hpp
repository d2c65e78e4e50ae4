#pragma once

#include <string>
#include <vector>

#include "calibra/errors.hpp"

namespace calibra {

/// A scalar field sampled on a uniform rectangular grid, row-major storage.
/// Dirichlet boundary values live in the same array (the outermost layer).
struct GridField {
  int d = 2;
  std::vector<int> shape;  // n1 ... nd, each >= 3
  double h = 1.0;
  std::vector<double> values;

  static GridField zeros(std::vector<int> shape, double h);

  std::size_t size() const { return values.size(); }
  std::size_t idx2(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(shape[1]) +
           static_cast<std::size_t>(j);
  }
  std::size_t idx3(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(shape[1]) +
            static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(shape[2]) +
           static_cast<std::size_t>(k);
  }
  double& at2(int i, int j) { return values[idx2(i, j)]; }
  double at2(int i, int j) const { return values[idx2(i, j)]; }
  double& at3(int i, int j, int k) { return values[idx3(i, j, k)]; }
  double at3(int i, int j, int k) const { return values[idx3(i, j, k)]; }

  void check_shape() const;
};

/// -Div(grad f / sqrt(1 + |grad f|^2)) by conservative face-flux differencing;
/// nonzero on interior nodes only.
GridField minimal_residual(const GridField& f);

/// Im det_C(I + i Hess F): for n = 2 the 5-point trace, for n = 3
/// trace(Hess) - det(Hess) with the 4-point cross stencil for mixed terms.
GridField slag_residual(const GridField& f, int n);

/// Max curl defect max_{j<k} |d f_j / d x_k - d f_k / d x_j| over interior
/// nodes (central differences); near zero iff the graph is Lagrangian.
double lagrangian_check(const std::vector<GridField>& components);

enum class Equation { minimal, slag2, slag3 };
enum class Method { newton, picard };

struct SolveReport {
  GridField solution;
  int iterations = 0;
  double residual_norm = 0.0;
  Method method = Method::newton;
};

/// Thrown when an iteration budget runs out; carries the last iterate.
class SolveFailure : public NoConvergence {
public:
  SolveFailure(const std::string& what, SolveReport report)
      : NoConvergence(what, report.residual_norm), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

private:
  SolveReport report_;
};

/// Damped Newton from the discrete-harmonic extension of the boundary data;
/// analytic stencil Jacobian, matrix-free Krylov inner solves to 1e-12,
/// stops at residual inf-norm < 1e-10 or 50 iterations.
SolveReport solve_newton(Equation eq, const GridField& boundary);

/// Fixed-point (Green-operator) iteration f <- f - L^{-1} R(f) with L the
/// linearization at zero (the discrete Laplacian up to sign).  Converges only
/// in the small-data contraction regime; large boundary data is expected to
/// throw SolveFailure.
SolveReport solve_picard(Equation eq, const GridField& boundary);

/// Solvability-constrained Poisson solve on the torus: the right-hand side is
/// mean-subtracted and the solution is gauged to mean zero.
GridField poisson_periodic(const GridField& rhs);

/// Discrete-harmonic extension of the boundary layer of g.
GridField harmonic_extension(const GridField& g);

// Text grid format: header "GRID d n1 ... nd h", then row-major values,
// one per line, 17 significant digits.
void write_grid(const GridField& f, std::ostream& out);
GridField read_grid(std::istream& in);

}  // namespace calibra
