#include "platehom/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "platehom/green_operator.hpp"

namespace platehom {

namespace {

bool is_uniform(const TensorField& f) {
  const std::size_t m = static_cast<std::size_t>(f.m);
  for (std::size_t i = m; i < f.data.size(); ++i) {
    if (f.data[i] != f.data[i % m]) return false;
  }
  return true;
}

// Forward transform with an exact result for spatially constant fields.
SpectralField transform_exact(const FourierTransform& fft, const TensorField& f) {
  if (!is_uniform(f)) return fft.forward(f);
  SpectralField out(f.dim, f.n, f.m);
  const double count = static_cast<double>(f.voxel_count());
  for (int k = 0; k < f.m; ++k) out.at(0)[k] = f.data[k] * count;
  return out;
}

bool all_zero(const SpectralField& f) {
  return std::all_of(f.data.begin(), f.data.end(),
                     [](const Complex& c) { return c == Complex{}; });
}

double mean_drift(const TensorField& e, const MandelVector& target) {
  return (e.mean() - target).cwiseAbs().maxCoeff();
}

}  // namespace

std::string to_string(ReferenceStrategy strategy) {
  switch (strategy) {
    case ReferenceStrategy::arithmetic: return "arithmetic";
    case ReferenceStrategy::geometric: return "geometric";
    case ReferenceStrategy::manual: return "manual";
  }
  return "unknown";
}

ReferenceStrategy parse_reference_strategy(const std::string& name) {
  if (name == "arithmetic") return ReferenceStrategy::arithmetic;
  if (name == "geometric") return ReferenceStrategy::geometric;
  if (name == "manual") return ReferenceStrategy::manual;
  throw InvalidArgument("unknown reference strategy '" + name + "'");
}

ReferenceMedium select_reference(const CoefficientField& field,
                                 ReferenceStrategy strategy,
                                 std::optional<double> manual_lambda0) {
  const auto [lo, hi] = eigen_range(field);
  ReferenceMedium ref{0.0, strategy, lo, hi};
  switch (strategy) {
    case ReferenceStrategy::arithmetic:
      ref.lambda0 = 0.5 * (lo + hi);
      break;
    case ReferenceStrategy::geometric:
      ref.lambda0 = std::sqrt(lo * hi);
      break;
    case ReferenceStrategy::manual:
      if (!manual_lambda0) {
        throw InvalidArgument("manual reference requires lambda0");
      }
      ref.lambda0 = *manual_lambda0;
      break;
  }
  if (!(ref.lambda0 > 0.0) || !std::isfinite(ref.lambda0)) {
    throw InvalidArgument("reference lambda0 must be positive");
  }
  return ref;
}

double spectral_bound(double mu_min, double mu_max) {
  if (!(mu_min > 0.0) || !(mu_max >= mu_min)) {
    throw InvalidArgument("spectral bound needs 0 < mu_min <= mu_max");
  }
  return (mu_max - mu_min) / (mu_max + mu_min);
}

// ---------------------------------------------------------------------------

PerturbationOperator::PerturbationOperator(const CoefficientField& field,
                                           double lambda0)
    : dim_{field.dim()}, n_{field.resolution()}, lambda0_{lambda0},
      fft_{field.dim(), field.resolution()} {
  if (!(lambda0 > 0.0)) throw InvalidArgument("lambda0 must be positive");
  const MandelMatrix reference =
      StiffTensor4::trace_reference(dim_, lambda0).mandel();
  std::map<int, int> slots;
  for (const auto& [id, c] : field.phase_table().phases()) {
    slots[id] = static_cast<int>(stiffness_.size());
    stiffness_.push_back(c.mandel());
    perturbation_.push_back(c.mandel() - reference);
  }
  slot_.reserve(field.voxel_count());
  for (int id : field.phase_map()) slot_.push_back(slots.at(id));
}

TensorField PerturbationOperator::contract(
    const std::vector<MandelMatrix>& tensors, const TensorField& strain) const {
  if (strain.dim != dim_ || strain.n != n_ || strain.m != mandel_size(dim_)) {
    throw DimensionError("strain field does not match the coefficient field");
  }
  TensorField out(dim_, n_, strain.m);
  const int m = strain.m;
  for (std::size_t v = 0; v < slot_.size(); ++v) {
    const MandelMatrix& c = tensors[slot_[v]];
    const auto e = strain.at(v);
    auto o = out.at(v);
    for (int a = 0; a < m; ++a) {
      double sum = 0.0;
      for (int b = 0; b < m; ++b) sum += c(a, b) * e[b];
      o[a] = sum;
    }
  }
  return out;
}

TensorField PerturbationOperator::polarization(const TensorField& strain) const {
  return contract(perturbation_, strain);
}

TensorField PerturbationOperator::moment(const TensorField& strain) const {
  return contract(stiffness_, strain);
}

TensorField PerturbationOperator::apply(const TensorField& strain) const {
  const SpectralField tau = transform_exact(fft_, polarization(strain));
  const SpectralField correction = gamma_apply(tau, lambda0_);
  if (all_zero(correction)) return TensorField(dim_, n_, strain.m);
  return fft_.inverse(correction);
}

double estimate_spectral_radius(const CoefficientField& field,
                                const ReferenceMedium& ref, int iterations,
                                std::uint64_t seed) {
  if (iterations < 10) throw InvalidArgument("power iteration needs >= 10 steps");
  const PerturbationOperator op(field, ref.lambda0);
  const int m = mandel_size(field.dim());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  TensorField x(field.dim(), field.resolution(), m);
  for (double& value : x.data) value = uniform(rng);
  const MandelVector mean = x.mean();
  for (std::size_t v = 0; v < x.voxel_count(); ++v) {
    for (int k = 0; k < m; ++k) x.at(v)[k] -= mean(k);
  }

  constexpr int kTail = 5;
  std::vector<double> ratios;
  double norm = l2_norm(x);
  if (norm == 0.0) return 0.0;
  for (int it = 0; it < iterations; ++it) {
    for (double& value : x.data) value /= norm;
    TensorField y = op.apply(x);
    const double next = l2_norm(y);
    if (next <= 1e-12) return 0.0;
    ratios.push_back(next);
    x = std::move(y);
    norm = next;
  }
  double log_sum = 0.0;
  for (std::size_t i = ratios.size() - kTail; i < ratios.size(); ++i) {
    log_sum += std::log(ratios[i]);
  }
  return std::exp(log_sum / kTail);
}

// ---------------------------------------------------------------------------

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
}

double equilibrium_residual(const SpectralField& moment_hat) {
  const auto grid = moment_hat.grid();
  const int dim = moment_hat.dim;
  double mean_norm2 = 0.0;
  for (int k = 0; k < moment_hat.m; ++k) mean_norm2 += std::norm(moment_hat.at(0)[k]);
  if (mean_norm2 == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t f = 1; f < grid.size(); ++f) {
    if (!grid.resolved(f)) continue;
    const auto freq = grid.frequency(f);
    const MandelVector u =
        dyad_mandel(std::span<const int>(freq.data(), static_cast<std::size_t>(dim)));
    Complex divergence{};
    for (int k = 0; k < moment_hat.m; ++k) divergence += u(k) * moment_hat.at(f)[k];
    sum += std::norm(divergence);
  }
  return std::sqrt(sum / mean_norm2);
}

CellSolution solve_cell(const CoefficientField& field, const ReferenceMedium& ref,
                        const SolverConfig& config) {
  config.validate();
  const int dim = field.dim();
  const int n = field.resolution();
  const int m = mandel_size(dim);
  if (config.macro_curvature.dim() != dim) {
    throw DimensionError("macroscopic curvature dimension differs from field");
  }
  const MandelVector e0 = config.macro_curvature.mandel();

  CellSolution sol;
  sol.curvature = TensorField::constant(dim, n, e0);
  if (e0.isZero(0.0)) {
    sol.moment = TensorField(dim, n, m);
    sol.converged = true;
    return sol;
  }

  const PerturbationOperator op(field, ref.lambda0);
  const FourierTransform& fft = op.transform();
  const double count = static_cast<double>(field.voxel_count());

  // The iterate is E0 + IFFT(correction); correction(0) stays zero.
  SpectralField correction(dim, n, m);
  TensorField e = sol.curvature;
  double delta = 0.0;
  for (int k = 0;; ++k) {
    TensorField moment = op.moment(e);
    SpectralField moment_hat = transform_exact(fft, moment);
    const double residual = equilibrium_residual(moment_hat);

    if (k >= 1) {
      IterationRecord rec;
      rec.iteration = k;
      rec.residual = residual;
      rec.delta = delta;
      rec.energy = l2_inner(e, moment);
      rec.mean_drift = mean_drift(e, e0);
      sol.history.push_back(rec);
      sol.iterations = k;
      sol.final_residual = residual;
      if (residual <= config.tolerance) sol.converged = true;
    }
    const bool finished = sol.converged || k == config.max_iterations ||
                          !std::isfinite(residual);
    if (finished) {
      sol.curvature = std::move(e);
      sol.moment = std::move(moment);
      break;
    }

    // Polarization dC : E = C : E - lambda0 Tr(E) I, formed in Fourier space.
    SpectralField& tau = moment_hat;
    for (std::size_t f = 0; f < tau.size(); ++f) {
      Complex trace = f == 0 ? Complex{count * e0.head(dim).sum()} : Complex{};
      for (int a = 0; a < dim; ++a) trace += correction.at(f)[a];
      for (int a = 0; a < dim; ++a) tau.at(f)[a] -= ref.lambda0 * trace;
    }
    correction = gamma_apply(tau, ref.lambda0);

    TensorField next = TensorField::constant(dim, n, e0);
    if (!all_zero(correction)) {
      const TensorField fluct = fft.inverse(correction);
      for (std::size_t i = 0; i < next.data.size(); ++i) next.data[i] += fluct.data[i];
    }
    double diff2 = 0.0;
    for (std::size_t i = 0; i < next.data.size(); ++i) {
      const double d = next.data[i] - e.data[i];
      diff2 += d * d;
    }
    delta = std::sqrt(diff2 / count);
    e = std::move(next);
  }
  return sol;
}

// ---------------------------------------------------------------------------

AprioriBound apriori_bound(double contrast) {
  AprioriBound bound;
  bound.contrast = contrast;
  if (contrast < 1.0) bound.series_factor = 1.0 / (1.0 - contrast);
  return bound;
}

AprioriBound apriori_bound(const CoefficientField& field,
                           const ReferenceMedium& ref) {
  if (!(ref.lambda0 > 0.0)) throw InvalidArgument("lambda0 must be positive");
  const auto fractions = field.volume_fractions();
  double worst = 0.0;
  for (const auto& [id, fraction] : fractions) {
    const StiffTensor4& c = field.phase_table().at(id);
    const StiffTensor4 delta = c - StiffTensor4::scalar(c.dim(), ref.lambda0);
    worst = std::max(worst, delta.operator_norm());
  }
  return apriori_bound(worst / ref.lambda0);
}

}  // namespace platehom
