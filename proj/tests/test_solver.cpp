#include <gtest/gtest.h>

#include <cmath>

#include "platehom/microstructure.hpp"
#include "platehom/solver.hpp"

using namespace platehom;

namespace {

StiffTensor4 iso(double c) { return StiffTensor4::scalar(2, c); }

SymTensor2 curvature(double a, double b, double c) {
  MandelVector v(3);
  v << a, b, c;
  return SymTensor2::from_mandel(2, v);
}

SolverConfig config_for(const SymTensor2& e0, double tol = 1e-10, int max_it = 5000) {
  SolverConfig c;
  c.macro_curvature = e0;
  c.tolerance = tol;
  c.max_iterations = max_it;
  return c;
}

double max_abs_diff(const TensorField& a, const TensorField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

double max_abs(const TensorField& a) {
  double m = 0.0;
  for (double x : a.data) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(ReferenceSelection, Rules) {
  const auto f = generate_chessboard(iso(1.0), iso(4.0), 8);
  EXPECT_DOUBLE_EQ(select_reference(f, ReferenceStrategy::arithmetic).lambda0, 2.5);
  EXPECT_DOUBLE_EQ(select_reference(f, ReferenceStrategy::geometric).lambda0, 2.0);
  EXPECT_DOUBLE_EQ(select_reference(f, ReferenceStrategy::manual, 7.0).lambda0, 7.0);
  EXPECT_THROW(select_reference(f, ReferenceStrategy::manual), InvalidArgument);
  EXPECT_THROW(select_reference(f, ReferenceStrategy::manual, -1.0), InvalidArgument);
  const auto ref = select_reference(f, ReferenceStrategy::arithmetic);
  EXPECT_GT(ref.lambda0, ref.mu_max / 2.0);
  EXPECT_EQ(parse_reference_strategy("geometric"), ReferenceStrategy::geometric);
  EXPECT_THROW(parse_reference_strategy("harmonic"), InvalidArgument);
}

TEST(SpectralBound, ClosedForm) {
  EXPECT_DOUBLE_EQ(spectral_bound(1.0, 3.0), 0.5);
  EXPECT_DOUBLE_EQ(spectral_bound(2.0, 2.0), 0.0);
  EXPECT_THROW(spectral_bound(0.0, 1.0), InvalidArgument);
  EXPECT_THROW(spectral_bound(2.0, 1.0), InvalidArgument);
}

TEST(AprioriBound, SeriesFactor) {
  const auto f = generate_chessboard(iso(1.0), iso(3.0), 8);
  const auto b = apriori_bound(f, select_reference(f, ReferenceStrategy::arithmetic));
  EXPECT_DOUBLE_EQ(b.contrast, 0.5);
  ASSERT_TRUE(b.series_factor);
  EXPECT_DOUBLE_EQ(*b.series_factor, 2.0);
  const auto low = apriori_bound(f, select_reference(f, ReferenceStrategy::manual, 0.5));
  EXPECT_TRUE(low.diverges());
}

TEST(EquilibriumResidual, SingleModeOracle) {
  const int n = 8;
  const double a = 0.3;
  TensorField j(2, n, 3);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) j.at(p * n + q)[0] = 1.0 + a * std::cos(2.0 * M_PI * p / n);
  const FourierTransform fft(2, n);
  EXPECT_NEAR(equilibrium_residual(fft.forward(j)), a / std::sqrt(2.0), 1e-14);
  // a mode with n . J . n = 0 is in equilibrium: J22 varying along axis 0
  TensorField k(2, n, 3);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      k.at(p * n + q)[0] = 1.0;
      k.at(p * n + q)[1] = std::sin(2.0 * M_PI * p / n);
    }
  EXPECT_NEAR(equilibrium_residual(fft.forward(k)), 0.0, 1e-14);
}

TEST(SolveCell, HomogeneousConvergesAtFirstIteration) {
  MandelMatrix c(3, 3);
  c << 2.0, 0.4, 0.1, 0.4, 1.5, 0.0, 0.1, 0.0, 1.2;
  const auto f = generate_homogeneous(StiffTensor4::from_mandel(c), 8);
  const auto e0 = curvature(0.3, -1.0, 0.7);
  const auto sol = solve_cell(f, select_reference(f, ReferenceStrategy::arithmetic), config_for(e0));
  EXPECT_TRUE(sol.converged);
  EXPECT_EQ(sol.iterations, 1);
  EXPECT_EQ(sol.final_residual, 0.0);
  EXPECT_EQ(max_abs_diff(sol.curvature, TensorField::constant(2, 8, e0.mandel())), 0.0);
}

TEST(SolveCell, ZeroLoadGivesZeroSolution) {
  const auto f = generate_chessboard(iso(1.0), iso(3.0), 8);
  const auto sol = solve_cell(f, select_reference(f, ReferenceStrategy::arithmetic),
                              config_for(SymTensor2(2)));
  EXPECT_TRUE(sol.converged);
  EXPECT_EQ(sol.iterations, 0);
  EXPECT_EQ(max_abs(sol.curvature), 0.0);
  EXPECT_EQ(max_abs(sol.moment), 0.0);
}

TEST(SolveCell, TwoStepsMatchTruncatedNeumannSeries) {
  const auto f = generate_inclusion(iso(1.0), iso(5.0), 0.3, 16);
  const auto ref = select_reference(f, ReferenceStrategy::arithmetic);
  const auto e0 = curvature(1.0, 0.5, -0.25);
  const auto sol = solve_cell(f, ref, config_for(e0, 1e-30, 2));
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.iterations, 2);

  const PerturbationOperator b(f, ref.lambda0);
  const TensorField x0 = TensorField::constant(2, 16, e0.mandel());
  const TensorField x1 = b.apply(x0);
  const TensorField x2 = b.apply(x1);
  TensorField series = x0;
  for (std::size_t i = 0; i < series.data.size(); ++i) series.data[i] += x1.data[i] + x2.data[i];
  EXPECT_LT(max_abs_diff(sol.curvature, series), 1e-12 * max_abs(series));
}

TEST(SolveCell, LaminateMatchesPiecewiseOracle) {
  const double alpha = 1.0, beta = 3.0, theta = 0.5;
  const int n = 32;
  const auto f = generate_laminate(iso(alpha), iso(beta), theta, 0, n);
  const auto ref = select_reference(f, ReferenceStrategy::arithmetic);
  const double harmonic = 1.0 / (theta / alpha + (1.0 - theta) / beta);

  // across the layers: the moment J11 is constant, E11 = H / c(x)
  const auto across = solve_cell(f, ref, config_for(curvature(1.0, 0.0, 0.0)));
  ASSERT_TRUE(across.converged);
  for (std::size_t v = 0; v < f.voxel_count(); ++v) {
    const double c = f.phase_at(v) == kPhaseA ? alpha : beta;
    EXPECT_NEAR(across.curvature.at(v)[0], harmonic / c, 1e-10);
    EXPECT_NEAR(across.curvature.at(v)[1], 0.0, 1e-10);
    EXPECT_NEAR(across.curvature.at(v)[2], 0.0, 1e-10);
  }
  // along the layers: the uniform curvature is already compatible
  const auto along = solve_cell(f, ref, config_for(curvature(0.0, 1.0, 0.0)));
  ASSERT_TRUE(along.converged);
  EXPECT_NEAR(along.moment.mean()(1), theta * alpha + (1.0 - theta) * beta, 1e-12);
  EXPECT_LT(max_abs_diff(along.curvature, TensorField::constant(2, n, curvature(0, 1, 0).mandel())),
            1e-12);
}

TEST(SolveCell, MeanIsPreservedAtEveryIteration) {
  const auto f = generate_inclusion(iso(1.0), iso(10.0), 0.25, 32);
  const auto sol = solve_cell(f, select_reference(f, ReferenceStrategy::arithmetic),
                              config_for(curvature(0.2, 1.0, -0.3)));
  ASSERT_TRUE(sol.converged);
  for (const auto& rec : sol.history) EXPECT_LE(rec.mean_drift, 1e-12) << rec.iteration;
}

TEST(SolveCell, ResidualTailContractsAtEstimatedRate) {
  const auto check = [](const CoefficientField& f) {
    const auto ref = select_reference(f, ReferenceStrategy::arithmetic);
    const double rho = estimate_spectral_radius(f, ref, 200, 7);
    const auto sol = solve_cell(f, ref, config_for(curvature(1.0, 0.0, 0.0)));
    ASSERT_TRUE(sol.converged);
    for (std::size_t k = 10; k + 1 < sol.history.size(); ++k) {
      EXPECT_LE(sol.history[k + 1].residual, sol.history[k].residual * (rho + 0.1))
          << "iteration " << sol.history[k + 1].iteration;
    }
  };
  check(generate_chessboard(iso(1.0), iso(3.0), 32));
  check(generate_inclusion(iso(1.0), iso(10.0), 0.25, 32));
}

TEST(SolveCell, LinearInLoadAndInvariantUnderStiffnessScaling) {
  const auto f = generate_inclusion(iso(2.0), iso(7.0), 0.3, 16);
  const auto g = generate_inclusion(iso(6.0), iso(21.0), 0.3, 16);
  const auto e0 = curvature(0.4, -0.1, 0.9);
  const auto a = solve_cell(f, select_reference(f, ReferenceStrategy::arithmetic), config_for(e0));
  const auto b = solve_cell(f, select_reference(f, ReferenceStrategy::arithmetic),
                            config_for(2.0 * e0));
  const auto c = solve_cell(g, select_reference(g, ReferenceStrategy::arithmetic), config_for(e0));
  ASSERT_TRUE(a.converged && b.converged && c.converged);
  TensorField doubled = a.curvature;
  for (double& x : doubled.data) x *= 2.0;
  EXPECT_LT(max_abs_diff(b.curvature, doubled), 1e-12 * max_abs(doubled));
  EXPECT_EQ(a.iterations, c.iterations);
  EXPECT_LT(max_abs_diff(c.curvature, a.curvature), 1e-12 * max_abs(a.curvature));
  TensorField tripled = a.moment;
  for (double& x : tripled.data) x *= 3.0;
  EXPECT_LT(max_abs_diff(c.moment, tripled), 1e-12 * max_abs(tripled));
}

TEST(SolveCell, ChessboardRotationEquivariance) {
  const int n = 16;
  const auto f = generate_chessboard(iso(1.0), iso(3.0), n);
  const auto swapped = generate_chessboard(iso(3.0), iso(1.0), n);
  const auto ref = select_reference(f, ReferenceStrategy::arithmetic);
  const auto a = solve_cell(f, ref, config_for(curvature(1.0, 0.3, 0.2), 1e-12));
  const auto b = solve_cell(swapped, ref, config_for(curvature(0.3, 1.0, -0.2), 1e-12));
  ASSERT_TRUE(a.converged && b.converged);
  // 90 degree rotation about the cell center: voxel (i, j) -> (j, N-1-i),
  // E11 <-> E22, E12 -> -E12
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto ea = a.curvature.at(f.flat_index({i, j, 0}));
      const auto eb = b.curvature.at(f.flat_index({j, n - 1 - i, 0}));
      EXPECT_NEAR(eb[0], ea[1], 1e-8);
      EXPECT_NEAR(eb[1], ea[0], 1e-8);
      EXPECT_NEAR(eb[2], -ea[2], 1e-8);
    }
}

TEST(SolveCell, EnergyMatchesMacroscopicWork) {
  const auto f = generate_inclusion(iso(1.0), iso(4.0), 0.3, 32);
  const auto e0 = curvature(1.0, 0.5, 0.3);
  const auto sol = solve_cell(f, select_reference(f, ReferenceStrategy::arithmetic), config_for(e0));
  ASSERT_TRUE(sol.converged);
  // <E : C : E> = E0 : <J> once E is compatible and J is equilibrated
  const double macro = e0.mandel().dot(sol.moment.mean());
  EXPECT_NEAR(sol.history.back().energy, macro, 1e-8 * macro);
  EXPECT_NEAR(l2_inner(sol.curvature, sol.moment), macro, 1e-8 * macro);
}

TEST(SolveCell, StopsAtIterationLimit) {
  const auto f = generate_inclusion(iso(1.0), iso(10.0), 0.25, 16);
  const auto sol = solve_cell(f, select_reference(f, ReferenceStrategy::arithmetic),
                              config_for(curvature(1.0, 0.0, 0.0), 1e-14, 5));
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.iterations, 5);
  EXPECT_EQ(sol.history.size(), 5u);
  EXPECT_THROW(solve_cell(f, select_reference(f, ReferenceStrategy::arithmetic),
                          config_for(curvature(1.0, 0.0, 0.0), 0.0)),
               InvalidArgument);
}

TEST(SpectralRadius, HomogeneousAndChessboard) {
  const auto h = generate_homogeneous(iso(2.0), 8);
  EXPECT_EQ(estimate_spectral_radius(h, select_reference(h, ReferenceStrategy::arithmetic), 20, 1), 0.0);
  const auto f = generate_chessboard(iso(1.0), iso(3.0), 32);
  const auto ref = select_reference(f, ReferenceStrategy::arithmetic);
  const double rho = estimate_spectral_radius(f, ref, 200, 3);
  EXPECT_LE(rho, 0.5 + 0.02);
  EXPECT_GT(rho, 0.3);
  EXPECT_EQ(rho, estimate_spectral_radius(f, ref, 200, 3));
  EXPECT_THROW(estimate_spectral_radius(f, ref, 5, 3), InvalidArgument);
}
