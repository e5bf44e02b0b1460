#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "platehom/microstructure.hpp"
#include "platehom/solver.hpp"
#include "platehom/tensor_core.hpp"

namespace platehom {

/// A load case of an effective-tensor computation failed to converge.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(int load_case, ConvergenceHistory history);

  int load_case() const { return load_case_; }
  const ConvergenceHistory& history() const { return history_; }

 private:
  int load_case_;
  ConvergenceHistory history_;
};

struct LoadCaseInfo {
  int iterations = 0;
  double final_residual = 0.0;
  ConvergenceHistory history;
};

struct EffectiveTensor {
  StiffTensor4 c_hom;
  /// max |C - C^T| / max |C| of the assembled matrix before symmetrization.
  double asymmetry = 0.0;
  std::vector<LoadCaseInfo> load_cases;
};

/// Solves one cell problem per Mandel basis curvature and assembles
/// C_hom e_k = <C : E^(k)>. config.macro_curvature is ignored. Throws
/// NonConvergenceError naming the first load case that failed.
EffectiveTensor effective_tensor(const CoefficientField& field,
                                 const ReferenceMedium& ref,
                                 const SolverConfig& config);

/// Positive-semidefinite order check: eigenvalues of upper - lower.
struct OrderCheck {
  std::vector<double> slack;
  bool holds = false;
};

/// Order check with tolerance: holds iff min slack >= -tolerance.
OrderCheck check_order(const StiffTensor4& lower, const StiffTensor4& upper,
                       double tolerance);

struct BoundsReport {
  StiffTensor4 voigt;
  StiffTensor4 reuss;
  /// Reuss <= Voigt, tolerance 1e-10 relative to ||Voigt||.
  OrderCheck reuss_below_voigt;
  /// Filled by bracket(): Reuss <= C_hom and C_hom <= Voigt.
  std::optional<OrderCheck> reuss_below_effective;
  std::optional<OrderCheck> effective_below_voigt;

  bool brackets() const {
    return reuss_below_voigt.holds && reuss_below_effective &&
           reuss_below_effective->holds && effective_below_voigt &&
           effective_below_voigt->holds;
  }
};

/// Volume averages <C> and <C^-1>^-1. Throws SingularTensorError for a
/// singular phase.
BoundsReport voigt_reuss_bounds(const CoefficientField& field);

/// Adds the comparisons against c_hom; slack tolerance is
/// relative_tolerance * ||Voigt||.
void bracket(BoundsReport& report, const StiffTensor4& c_hom,
             double relative_tolerance = 1e-8);

struct LaminateValues {
  double along = 0.0;
  double across = 0.0;
};

/// Arithmetic (along the layers) and harmonic (across) means of two
/// isotropic phases with fraction theta of the first.
LaminateValues analytic_laminate(double alpha, double beta, double theta);

/// sqrt(alpha beta), the classical second-order chessboard value. Used as a
/// reference value only.
double analytic_chessboard(double alpha, double beta);

}  // namespace platehom
