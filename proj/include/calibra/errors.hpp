#pragma once

#include <stdexcept>
#include <string>

namespace calibra {

// Base class for all domain errors.  Each error carries a stable name that the
// CLI prints verbatim, so callers can match on it without parsing messages.
class Error : public std::runtime_error {
public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

#define CALIBRA_DEFINE_ERROR(ClassName)                          \
  class ClassName : public Error {                               \
  public:                                                        \
    explicit ClassName(const std::string& what)                  \
        : Error(#ClassName, what) {}                             \
  }

CALIBRA_DEFINE_ERROR(IndexOutOfRange);
CALIBRA_DEFINE_ERROR(RepeatedIndex);
CALIBRA_DEFINE_ERROR(AmbientMismatch);
CALIBRA_DEFINE_ERROR(DegreeZero);
CALIBRA_DEFINE_ERROR(ArityMismatch);
CALIBRA_DEFINE_ERROR(RankDeficient);
CALIBRA_DEFINE_ERROR(ConventionUnresolved);
CALIBRA_DEFINE_ERROR(DegreeMismatch);
CALIBRA_DEFINE_ERROR(DimMismatch);
CALIBRA_DEFINE_ERROR(NotHalfDim);
CALIBRA_DEFINE_ERROR(UnsupportedAmbient);
CALIBRA_DEFINE_ERROR(UnsupportedDim);
CALIBRA_DEFINE_ERROR(NotTransverse);
CALIBRA_DEFINE_ERROR(PolygonInfeasible);
CALIBRA_DEFINE_ERROR(ClosureFailed);
CALIBRA_DEFINE_ERROR(DegenerateAngle);
CALIBRA_DEFINE_ERROR(QuadratureFailure);
CALIBRA_DEFINE_ERROR(DegenerateMetric);
CALIBRA_DEFINE_ERROR(ShapeTooSmall);
CALIBRA_DEFINE_ERROR(ShapeMismatch);
CALIBRA_DEFINE_ERROR(PreconditionViolated);

#undef CALIBRA_DEFINE_ERROR

// Iterative solvers throw this when the iteration budget runs out.  The best
// iterate is reported by the owning module (see graphpde::SolveFailure).
class NoConvergence : public Error {
public:
  NoConvergence(const std::string& what, double best_residual)
      : Error("NoConvergence", what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

private:
  double best_residual_;
};

}  // namespace calibra
