#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "platehom/microstructure.hpp"
#include "platehom/spectral_field.hpp"
#include "platehom/tensor_core.hpp"

namespace platehom {

enum class ReferenceStrategy { arithmetic, geometric, manual };

std::string to_string(ReferenceStrategy strategy);
/// Accepts "arithmetic", "geometric" and "manual".
ReferenceStrategy parse_reference_strategy(const std::string& name);

/// Scalar biharmonic reference lambda0 Delta^2, i.e. the constant tensor
/// xi -> lambda0 Tr(xi) I.
struct ReferenceMedium {
  double lambda0 = 1.0;
  ReferenceStrategy strategy = ReferenceStrategy::manual;
  double mu_min = 0.0;
  double mu_max = 0.0;
};

/// arithmetic: (mu_min + mu_max) / 2; geometric: sqrt(mu_min mu_max);
/// manual: `manual_lambda0`, which must be given and positive.
ReferenceMedium select_reference(const CoefficientField& field,
                                 ReferenceStrategy strategy,
                                 std::optional<double> manual_lambda0 = {});

/// Upper bound (mu_max - mu_min) / (mu_max + mu_min) on the spectral radius
/// of the perturbation operator under the arithmetic reference.
double spectral_bound(double mu_min, double mu_max);

/// The perturbation operator B : E -> Gamma(dC : E), dC = C - C_ref, acting
/// on real-space Mandel fields. The cell-problem fixed point is
/// E = E0 + B E.
class PerturbationOperator {
 public:
  PerturbationOperator(const CoefficientField& field, double lambda0);

  int dim() const { return dim_; }
  int resolution() const { return n_; }
  double lambda0() const { return lambda0_; }

  TensorField apply(const TensorField& strain) const;
  /// dC : E, voxel-wise.
  TensorField polarization(const TensorField& strain) const;
  /// C : E, voxel-wise.
  TensorField moment(const TensorField& strain) const;

  const FourierTransform& transform() const { return fft_; }

 private:
  TensorField contract(const std::vector<MandelMatrix>& tensors,
                       const TensorField& strain) const;

  int dim_;
  int n_;
  double lambda0_;
  std::vector<int> slot_;  // voxel -> index into the per-phase tensors
  std::vector<MandelMatrix> stiffness_;
  std::vector<MandelMatrix> perturbation_;
  FourierTransform fft_;
};

/// Power-iteration estimate of the spectral radius of B. Starts from a
/// seeded random mean-zero field; returns the geometric mean of the last five
/// norm ratios, or 0 when the iterates vanish.
double estimate_spectral_radius(const CoefficientField& field,
                                const ReferenceMedium& ref, int iterations,
                                std::uint64_t seed);

struct SolverConfig {
  double tolerance = 1e-8;
  int max_iterations = 5000;
  SymTensor2 macro_curvature{2};

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double residual = 0.0;
  /// ||E_k - E_{k-1}|| in the cell-averaged L2 norm.
  double delta = 0.0;
  /// <E_k : C : E_k>
  double energy = 0.0;
  /// max |<E_k> - E0| over Mandel components.
  double mean_drift = 0.0;
};

using ConvergenceHistory = std::vector<IterationRecord>;

struct CellSolution {
  TensorField curvature;
  TensorField moment;
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  ConvergenceHistory history;
};

/// sqrt(sum_{n != 0} |n . J(n) . n|^2) / |J(0)| for the moment field J in
/// Fourier space; 0 for a vanishing mean.
double equilibrium_residual(const SpectralField& moment_hat);

/// Fixed-point iteration E_k = E0 + Gamma(dC : E_{k-1}) from E_0 = E0 until
/// the equilibrium residual drops to config.tolerance. A run that exhausts
/// max_iterations (or whose residual stops being finite) returns with
/// converged = false and the full history.
CellSolution solve_cell(const CoefficientField& field, const ReferenceMedium& ref,
                        const SolverConfig& config);

/// Geometric-series factor of the a-priori estimate. contrast is
/// q = max_y ||C(y) - lambda0 Id|| / lambda0; the factor 1 / (1 - q) exists
/// only for q < 1.
struct AprioriBound {
  double contrast = 0.0;
  std::optional<double> series_factor;

  bool diverges() const { return !series_factor.has_value(); }
};

AprioriBound apriori_bound(const CoefficientField& field,
                           const ReferenceMedium& ref);
/// Same factor for a given contrast q.
AprioriBound apriori_bound(double contrast);

}  // namespace platehom
