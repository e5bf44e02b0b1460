#include "platehom/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace platehom {

NonConvergenceError::NonConvergenceError(int load_case, ConvergenceHistory history)
    : Error("load case " + std::to_string(load_case) +
            " (Mandel basis curvature e_" + std::to_string(load_case) +
            ") did not converge"),
      load_case_{load_case}, history_{std::move(history)} {}

EffectiveTensor effective_tensor(const CoefficientField& field,
                                 const ReferenceMedium& ref,
                                 const SolverConfig& config) {
  const int dim = field.dim();
  const int m = mandel_size(dim);
  MandelMatrix assembled(m, m);
  EffectiveTensor result;
  for (int k = 0; k < m; ++k) {
    SolverConfig load = config;
    load.macro_curvature = SymTensor2::basis(dim, k);
    CellSolution sol = solve_cell(field, ref, load);
    if (!sol.converged) throw NonConvergenceError(k, std::move(sol.history));
    assembled.col(k) = sol.moment.mean();
    result.load_cases.push_back({sol.iterations, sol.final_residual,
                                 std::move(sol.history)});
  }
  const double scale = assembled.cwiseAbs().maxCoeff();
  result.asymmetry =
      scale == 0.0 ? 0.0
                   : (assembled - assembled.transpose()).cwiseAbs().maxCoeff() / scale;
  result.c_hom =
      StiffTensor4::from_mandel(0.5 * (assembled + assembled.transpose()));
  return result;
}

OrderCheck check_order(const StiffTensor4& lower, const StiffTensor4& upper,
                       double tolerance) {
  OrderCheck check;
  check.slack = eigenvalues(upper - lower);
  check.holds = check.slack.front() >= -tolerance;
  return check;
}

BoundsReport voigt_reuss_bounds(const CoefficientField& field) {
  const int dim = field.dim();
  StiffTensor4 voigt(dim);
  StiffTensor4 compliance(dim);
  for (const auto& [id, fraction] : field.volume_fractions()) {
    const StiffTensor4& c = field.phase_table().at(id);
    voigt += fraction * c;
    compliance += fraction * invert(c);
  }
  BoundsReport report{voigt, invert(compliance), {}, std::nullopt, std::nullopt};
  report.reuss_below_voigt =
      check_order(report.reuss, report.voigt, 1e-10 * voigt.operator_norm());
  return report;
}

void bracket(BoundsReport& report, const StiffTensor4& c_hom,
             double relative_tolerance) {
  const double tol = relative_tolerance * report.voigt.operator_norm();
  report.reuss_below_effective = check_order(report.reuss, c_hom, tol);
  report.effective_below_voigt = check_order(c_hom, report.voigt, tol);
}

LaminateValues analytic_laminate(double alpha, double beta, double theta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw InvalidArgument("laminate phases must be positive");
  }
  if (!(theta > 0.0 && theta < 1.0)) {
    throw InvalidArgument("laminate fraction must lie in (0, 1)");
  }
  return {theta * alpha + (1.0 - theta) * beta,
          1.0 / (theta / alpha + (1.0 - theta) / beta)};
}

double analytic_chessboard(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw InvalidArgument("chessboard phases must be positive");
  }
  return std::sqrt(alpha * beta);
}

}  // namespace platehom
