#include "platehom/green_operator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace platehom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm_squared(std::span<const int> n) {
  double s = 0.0;
  for (int k : n) s += static_cast<double>(k) * k;
  return s;
}

int checked_dim(std::size_t size) {
  if (size < 1 || size > 3) throw DimensionError("frequency dimension must be 1..3");
  return static_cast<int>(size);
}

// Calls visit(n) for every n with 0 < |n|_inf <= cutoff.
template <class Visitor>
void for_each_lattice_point(int dim, int cutoff, Visitor&& visit) {
  std::array<int, 3> n{0, 0, 0};
  for (int a = 0; a < dim; ++a) n[a] = -cutoff;
  while (true) {
    bool zero = true;
    for (int a = 0; a < dim; ++a) zero = zero && n[a] == 0;
    if (!zero) visit(std::span<const int>(n.data(), static_cast<std::size_t>(dim)));
    int a = dim - 1;
    while (a >= 0 && n[a] == cutoff) {
      n[a] = -cutoff;
      --a;
    }
    if (a < 0) break;
    ++n[a];
  }
}

std::span<const int> head(const std::array<int, 3>& n, int dim) {
  return {n.data(), static_cast<std::size_t>(dim)};
}

void check_tensor_field(const SpectralField& f) {
  if (f.m != mandel_size(f.dim)) {
    throw DimensionError("expected a symmetric tensor field in Mandel form");
  }
}

}  // namespace

double green_fourier_coefficient(std::span<const int> n) {
  const double n2 = norm_squared(n);
  if (n2 == 0.0) return 0.0;
  return -1.0 / (std::pow(kTwoPi, 4) * n2 * n2);
}

double green_evaluate(std::span<const double> y, int cutoff) {
  const int dim = checked_dim(y.size());
  if (cutoff < 1) throw InvalidArgument("cutoff must be >= 1");
  // Coefficients are even in n, so the series is a cosine sum.
  double sum = 0.0;
  for_each_lattice_point(dim, cutoff, [&](std::span<const int> n) {
    double phase = 0.0;
    for (int a = 0; a < dim; ++a) phase += n[a] * y[a];
    sum += green_fourier_coefficient(n) * std::cos(kTwoPi * phase);
  });
  return sum;
}

MandelVector dyad_mandel(std::span<const int> n) {
  const int dim = checked_dim(n.size());
  if (dim == 1) throw DimensionError("tensor fields need d >= 2");
  MandelVector v(mandel_size(dim));
  for (int k = 0; k < v.size(); ++k) {
    const auto [i, j] = mandel_pair(dim, k);
    v(k) = mandel_weight(dim, k) * n[i] * n[j];
  }
  return v;
}

MandelMatrix gamma_symbol(std::span<const int> n, double lambda0) {
  if (!(lambda0 > 0.0)) throw InvalidArgument("lambda0 must be positive");
  const int dim = checked_dim(n.size());
  const int m = mandel_size(dim);
  const double n2 = norm_squared(n);
  if (n2 == 0.0) return MandelMatrix::Zero(m, m);
  const MandelVector u = dyad_mandel(n);
  return -(u * u.transpose()) / (lambda0 * n2 * n2);
}

SpectralField gamma_apply(const SpectralField& polarization, double lambda0) {
  if (!(lambda0 > 0.0)) throw InvalidArgument("lambda0 must be positive");
  check_tensor_field(polarization);
  const auto grid = polarization.grid();
  const int dim = polarization.dim;
  const int m = polarization.m;
  SpectralField out(dim, polarization.n, m);
  for (std::size_t f = 1; f < grid.size(); ++f) {
    if (!grid.resolved(f)) continue;
    const auto freq = grid.frequency(f);
    const auto n = head(freq, dim);
    const double n2 = norm_squared(n);
    const MandelVector u = dyad_mandel(n);
    const auto p = polarization.at(f);
    Complex projection{};
    for (int k = 0; k < m; ++k) projection += u(k) * p[k];
    const Complex scale = -projection / (lambda0 * n2 * n2);
    auto o = out.at(f);
    for (int k = 0; k < m; ++k) o[k] = scale * u(k);
  }
  return out;
}

WeylParts weyl_decompose(const SpectralField& field) {
  check_tensor_field(field);
  const auto grid = field.grid();
  const int dim = field.dim;
  const int m = field.m;
  WeylParts parts{SpectralField(dim, field.n, m), field,
                  SpectralField(dim, field.n, m)};
  for (int k = 0; k < m; ++k) {
    parts.mean.at(0)[k] = field.at(0)[k];
    parts.solenoidal.at(0)[k] = 0.0;
  }
  for (std::size_t f = 1; f < grid.size(); ++f) {
    // Unresolved modes lie in the kernel of the Green operator.
    if (!grid.resolved(f)) continue;
    const auto freq = grid.frequency(f);
    const auto n = head(freq, dim);
    const double n2 = norm_squared(n);
    const MandelVector u = dyad_mandel(n);
    const auto p = field.at(f);
    Complex projection{};
    for (int k = 0; k < m; ++k) projection += u(k) * p[k];
    auto pot = parts.potential.at(f);
    auto sol = parts.solenoidal.at(f);
    for (int k = 0; k < m; ++k) {
      pot[k] = projection * u(k) / (n2 * n2);
      sol[k] = p[k] - pot[k];
    }
  }
  return parts;
}

// ---------------------------------------------------------------------------

SkewPotential::SkewPotential(int dim, int n)
    : dim_{dim}, n_{n}, stride_{static_cast<std::size_t>(dim * dim * dim * dim)} {
  const FrequencyGrid grid(dim, n);
  coeffs_.assign(grid.size() * stride_, Complex{});
}

SpectralField SkewPotential::double_divergence() const {
  const FrequencyGrid grid(dim_, n_);
  const int m = mandel_size(dim_);
  SpectralField out(dim_, n_, m);
  const double factor = -kTwoPi * kTwoPi;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const auto n = grid.frequency(f);
    for (int k = 0; k < m; ++k) {
      const auto [s, h] = mandel_pair(dim_, k);
      Complex sum{};
      for (int i = 0; i < dim_; ++i) {
        for (int j = 0; j < dim_; ++j) {
          sum += static_cast<double>(n[i] * n[j]) * (*this)(f, s, h, i, j);
        }
      }
      out.at(f)[k] = factor * mandel_weight(dim_, k) * sum;
    }
  }
  return out;
}

SkewPotential build_skew_potential(const SpectralField& g) {
  check_tensor_field(g);
  const int dim = g.dim;
  const int m = g.m;
  const auto grid = g.grid();

  double scale = 0.0;
  for (const Complex& c : g.data) scale = std::max(scale, std::abs(c));
  const double tol = 1e-10 * scale;
  for (int k = 0; k < m; ++k) {
    if (std::abs(g.at(0)[k]) > tol) {
      throw InvalidArgument("skew potential requires a mean-zero field");
    }
  }

  SkewPotential potential(dim, g.n);
  std::vector<Complex> dense(static_cast<std::size_t>(dim * dim));
  for (std::size_t f = 1; f < grid.size(); ++f) {
    const auto gf = g.at(f);
    if (!grid.resolved(f)) {
      for (int k = 0; k < m; ++k) {
        if (std::abs(gf[k]) > tol) {
          throw InvalidArgument("skew potential requires a field without "
                                "Nyquist content");
        }
      }
      continue;
    }
    const auto n = grid.frequency(f);
    const double n2 = norm_squared(head(n, dim));
    for (int k = 0; k < m; ++k) {
      const auto [i, j] = mandel_pair(dim, k);
      const Complex value = gf[k] / mandel_weight(dim, k);
      dense[i * dim + j] = value;
      dense[j * dim + i] = value;
    }
    Complex contraction{};
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        contraction += static_cast<double>(n[i] * n[j]) * dense[i * dim + j];
      }
    }
    if (std::abs(contraction) > tol * n2) {
      throw InvalidArgument("skew potential requires a solenoidal field "
                            "(n . g(n) . n != 0)");
    }
    const double factor = -1.0 / (kTwoPi * kTwoPi * n2 * n2);
    for (int s = 0; s < dim; ++s) {
      for (int h = 0; h < dim; ++h) {
        for (int i = 0; i < dim; ++i) {
          for (int j = 0; j < dim; ++j) {
            potential(f, s, h, i, j) =
                factor * (-dense[i * dim + j] * static_cast<double>(n[s] * n[h]) +
                          dense[s * dim + h] * static_cast<double>(n[i] * n[j]));
          }
        }
      }
    }
  }
  return potential;
}

double dirac_sobolev_partial_sum(double s, int dim, int cutoff) {
  if (dim < 1 || dim > 3) throw DimensionError("dimension must be 1..3");
  if (cutoff < 1) throw InvalidArgument("cutoff must be >= 1");
  double sum = 0.0;
  for_each_lattice_point(dim, cutoff, [&](std::span<const int> n) {
    sum += std::pow(1.0 + kTwoPi * kTwoPi * norm_squared(n), s);
  });
  return sum / std::pow(kTwoPi, dim);
}

}  // namespace platehom
