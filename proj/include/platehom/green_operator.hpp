#pragma once

#include <span>
#include <vector>

#include "platehom/spectral_field.hpp"
#include "platehom/tensor_core.hpp"

namespace platehom {

/// Fourier coefficient of the mean-zero periodic biharmonic fundamental
/// solution: -(2 pi)^-4 |n|^-4, and 0 at n = 0.
double green_fourier_coefficient(std::span<const int> n);

/// Truncated series of the periodic biharmonic Green function at y, summed
/// over frequencies with 0 < |n|_inf <= cutoff. The dimension is y.size().
double green_evaluate(std::span<const double> y, int cutoff);

/// Mandel vector of the dyad n (x) n.
MandelVector dyad_mandel(std::span<const int> n);

/// Symbol of the Green operator for the biharmonic reference
/// lambda0 Delta^2 at frequency n:
///
///   P -> -(n (x) n) (n . P . n) / (lambda0 |n|^4),
///
/// returned as a rank-one Mandel matrix; the zero matrix at n = 0.
MandelMatrix gamma_symbol(std::span<const int> n, double lambda0);

/// Applies gamma_symbol frequency by frequency. The n = 0 coefficient of the
/// result is exactly zero.
SpectralField gamma_apply(const SpectralField& polarization, double lambda0);

/// Potential part (image of D on mean-zero functions), mean-zero solenoidal
/// part, and the constant part of a tensor field. The three parts sum to the
/// input exactly.
struct WeylParts {
  SpectralField potential;
  SpectralField solenoidal;
  SpectralField mean;
};

WeylParts weyl_decompose(const SpectralField& field);

/// Per-frequency four-index potential G^{sh}_{ij} whose double divergence in
/// (i, j) reproduces a mean-zero solenoidal field g. Satisfies
/// G^{sh}_{ij} = G^{sh}_{ji} and G^{sh}_{ij} = -G^{ij}_{sh}.
class SkewPotential {
 public:
  SkewPotential(int dim, int n);

  int dim() const { return dim_; }
  int resolution() const { return n_; }
  std::size_t frequency_count() const { return coeffs_.size() / stride_; }

  Complex& operator()(std::size_t freq, int s, int h, int i, int j) {
    return coeffs_[offset(freq, s, h, i, j)];
  }
  Complex operator()(std::size_t freq, int s, int h, int i, int j) const {
    return coeffs_[offset(freq, s, h, i, j)];
  }

  /// Mode-wise second divergence over (i, j); returns the Mandel field with
  /// tensor components (s, h).
  SpectralField double_divergence() const;

 private:
  std::size_t offset(std::size_t freq, int s, int h, int i, int j) const {
    return freq * stride_ +
           static_cast<std::size_t>(((s * dim_ + h) * dim_ + i) * dim_ + j);
  }

  int dim_;
  int n_;
  std::size_t stride_;
  std::vector<Complex> coeffs_;
};

/// Throws InvalidArgument unless g has zero mean and n . g(n) . n = 0 at every
/// frequency, both to 1e-10 relative.
SkewPotential build_skew_potential(const SpectralField& g);

/// Periodic lattice analogue of the H^s norm of the Dirac distribution:
/// sum over 0 < |n|_inf <= cutoff of (1 + |2 pi n|^2)^s / (2 pi)^d.
double dirac_sobolev_partial_sum(double s, int dim, int cutoff);

}  // namespace platehom
