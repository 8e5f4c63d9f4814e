#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hyperns/errors.hpp"
#include "hyperns/experiments.hpp"
#include "oracles.hpp"

using namespace hyperns;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SimConfig small_config() {
  SimConfig cfg;
  cfg.nu = 5e-2;
  cfg.eps = 1e-3;
  cfg.symbol.alpha = 1.5;
  cfg.n = 16;
  cfg.dim = 2;
  cfg.dt = 5e-3;
  cfg.t_end = 0.1;
  cfg.output_every = 2;
  cfg.ic.kind = InitialConditionSpec::Kind::random;
  cfg.random = {11, 2.0, 2.0, 0.5};
  return cfg;
}

SpectralVelocity single_mode(const Lattice& lat, std::array<int, 3> kappa) {
  SpectralVectorField v(lat);
  const std::size_t f = lat.flat_index(kappa);
  const int free_axis = kappa[0] == 0 ? 0 : 1;
  v.component(free_axis)[f] = Complex(0.3, -0.7);
  v.component(free_axis)[lat.mirror(f)] = Complex(0.3, 0.7);
  return leray_project(std::move(v));
}

}  // namespace

TEST(Dilate, CriticalOrderPreservesNormIn3D) {
  const Lattice lat = Lattice::build(32, 3, kTwoPi);
  const SpectralVelocity u = oracle::random_bandlimited(lat, 3, 3);
  const double norm = l2_norm(u.field());
  for (int lambda : {1, 2, 3}) {
    const DilationResult d = dilate(u, lambda, 1.25);
    EXPECT_EQ(d.norm_exponent, 0.0);
    EXPECT_NEAR(cell_l2_norm(d), norm, 1e-13 * norm);
  }
}

TEST(Dilate, NormLawFollowsExponent) {
  const Lattice lat3 = Lattice::build(16, 3, kTwoPi);
  const SpectralVelocity u3 = oracle::random_bandlimited(lat3, 4, 2);
  const DilationResult d = dilate(u3, 2, 1.5);
  EXPECT_NEAR(cell_l2_norm(d) / l2_norm(u3.field()), 1.4142136, 1e-7);

  const Lattice lat2 = Lattice::build(32, 2, 1.7);
  const SpectralVelocity u2 = oracle::random_bandlimited(lat2, 5, 4);
  for (double alpha : {1.125, 1.25, 1.5, 2.0}) {
    for (int lambda : {2, 3}) {
      const DilationResult d2 = dilate(u2, lambda, alpha);
      EXPECT_DOUBLE_EQ(d2.norm_exponent, 4.0 * alpha - 4.0);
      const double ratio = std::pow(cell_l2_norm(d2) / l2_norm(u2.field()), 2);
      EXPECT_NEAR(ratio, std::pow(lambda, d2.norm_exponent), 1e-12 * ratio);
    }
  }
}

TEST(Dilate, IdentityAtLambdaOne) {
  const Lattice lat = Lattice::build(16, 2, kTwoPi);
  const SpectralVelocity u = oracle::random_bandlimited(lat, 6, 5);
  EXPECT_EQ(dilate(u, 1, 1.7).u, u);
}

TEST(Dilate, MovesModesAndScalesAmplitude) {
  const Lattice lat = Lattice::build(16, 2, kTwoPi);
  const SpectralVelocity u = single_mode(lat, {1, 2, 0});
  const DilationResult d = dilate(u, 3, 1.25);
  const std::size_t from = lat.flat_index({1, 2, 0}), to = lat.flat_index({3, 6, 0});
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(std::abs(d.u.component(i)[to] - std::pow(3.0, 1.5) * u.component(i)[from]), 0.0, 1e-15);
    EXPECT_EQ(d.u.component(i)[from], Complex(0.0, 0.0));
  }
}

TEST(Dilate, RejectsModesLeavingTheLattice) {
  const Lattice lat = Lattice::build(16, 2, kTwoPi);
  const SpectralVelocity u = single_mode(lat, {3, 0, 0});
  EXPECT_THROW(dilate(u, 3, 1.25), std::invalid_argument);
  EXPECT_THROW(dilate(u, 0, 1.25), std::invalid_argument);
  EXPECT_NO_THROW(dilate(u, 2, 1.25));
}

TEST(ScalingCovariance, SingleModeIsExact) {
  const Lattice lat = Lattice::build(32, 3, kTwoPi);
  const SpectralVelocity u = single_mode(lat, {1, -2, 0});
  for (double alpha : {1.25, 1.5}) EXPECT_LE(scaling_covariance_residual(u, 2, alpha, 0.7), 1e-14);
}

TEST(ScalingCovariance, TaylorGreenIsExact) {
  const Lattice lat = Lattice::build(32, 2, kTwoPi);
  EXPECT_LE(scaling_covariance_residual(taylor_green(lat), 3, 1.25, 1.0), 1e-14);
}

TEST(ScalingCovariance, RandomBandlimitedField) {
  for (int dim : {2, 3}) {
    const Lattice lat = Lattice::build(dim == 2 ? 64 : 32, dim, kTwoPi);
    const int support = dim == 2 ? 5 : 2;
    for (std::uint64_t seed = 0; seed < 2; ++seed) {
      const SpectralVelocity u = oracle::random_bandlimited(lat, 40 + seed, support);
      ASSERT_EQ(spectral_support(u), support);
      EXPECT_LE(scaling_covariance_residual(u, 2, 1.25, 1.0), 1e-12) << "dim=" << dim;
      EXPECT_LE(scaling_covariance_residual(u, 2, 1.5, 0.3), 1e-12) << "dim=" << dim;
    }
  }
}

TEST(ScalingCovariance, RefusesBandOverflow) {
  const Lattice lat = Lattice::build(32, 2, kTwoPi);
  const SpectralVelocity u = oracle::random_bandlimited(lat, 2, 4);
  EXPECT_THROW(scaling_covariance_residual(u, 2, 1.25, 1.0), std::invalid_argument);
}

TEST(LogLogFit, RecoversPowerLaw) {
  const std::vector<double> x{1e-4, 3e-4, 1e-3, 3e-3, 1e-2};
  std::vector<double> y;
  for (double v : x) y.push_back(7.0 * std::pow(v, 1.3));
  const LogLogFit fit = fit_log_log(x, y);
  EXPECT_NEAR(fit.slope, 1.3, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log10(7.0), 1e-12);
  EXPECT_LT(fit.rms, 1e-12);
  EXPECT_EQ(fit.points, 5u);
  EXPECT_THROW(fit_log_log(std::span(x).first(3), std::span(y).first(3)), std::invalid_argument);
}

TEST(SobolevDistance, IdenticalRunsAreAtZeroDistance) {
  SimConfig cfg = small_config();
  cfg.eps = 0.0;
  std::vector<SpectralVelocity> a, b;
  const DiagnosticSink sa[] = {[&](const TrajectoryState& s, const DiagnosticsRecord&) { a.push_back(s.u); }};
  const DiagnosticSink sb[] = {[&](const TrajectoryState& s, const DiagnosticsRecord&) { b.push_back(s.u); }};
  run(cfg, sa);
  run(cfg, sb);
  ASSERT_GT(a.size(), 2u);
  EXPECT_EQ(sup_sobolev_distance(a, b, 1.5), 0.0);
  b.pop_back();
  EXPECT_THROW(sup_sobolev_distance(a, b, 1.5), std::invalid_argument);
}

TEST(TailFraction, ConcentratesAtHighShells) {
  const Lattice lat = Lattice::build(32, 2, kTwoPi);
  EXPECT_EQ(spectral_tail_fraction(single_mode(lat, {2, 0, 0})), 0.0);
  EXPECT_NEAR(spectral_tail_fraction(single_mode(lat, {10, 0, 0})), 1.0, 1e-15);
}

TEST(EpsSweep, RejectsUnusableParameterLists) {
  const SimConfig cfg = small_config();
  const std::vector<double> one{1e-3};
  EXPECT_THROW(vanishing_eps_sweep(cfg, one, 2.0, 0.1), std::invalid_argument);
  const std::vector<double> narrow{1e-2, 8e-3, 5e-3, 2e-3};
  EXPECT_THROW(vanishing_eps_sweep(cfg, narrow, 2.0, 0.1), std::invalid_argument);
  const std::vector<double> unsorted{1e-4, 1e-3, 1e-2, 1e-1};
  EXPECT_THROW(vanishing_eps_sweep(cfg, unsorted, 2.0, 0.1), std::invalid_argument);
  const std::vector<double> with_zero{1e-1, 1e-2, 1e-3, 0.0};
  EXPECT_THROW(vanishing_eps_sweep(cfg, with_zero, 2.0, 0.1), std::invalid_argument);
}

TEST(EpsSweep, AbortsWhenReferenceIsUnresolved) {
  SimConfig cfg = small_config();
  cfg.random = {11, 2.0, 1e3, 0.5};
  const std::vector<double> eps{1e-2, 1e-3, 3e-4, 1e-4};
  EXPECT_THROW(vanishing_eps_sweep(cfg, eps, 2.0, 0.05), NumericalError);
}

TEST(EpsSweep, DeterministicAndOrderedByParameter) {
  SimConfig cfg = small_config();
  cfg.n = 32;
  cfg.random.k_c = 1.5;
  const std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
  SweepOptions serial;
  serial.parallel = false;
  const SweepResult a = vanishing_eps_sweep(cfg, eps, 2.0, 0.1);
  const SweepResult b = vanishing_eps_sweep(cfg, eps, 2.0, 0.1, serial);
  EXPECT_EQ(a.values, eps);
  EXPECT_EQ(a.outcomes, b.outcomes);
  ASSERT_EQ(a.outcomes.size(), eps.size());
  EXPECT_EQ(a.outcome_names.front(), "error");
  ASSERT_TRUE(a.fit.has_value());
  EXPECT_EQ(a.fit->slope, b.fit->slope);
  for (std::size_t i = 1; i < eps.size(); ++i) EXPECT_LT(a.outcomes[i][0], a.outcomes[i - 1][0]);
  const CsvTable t = a.table();
  EXPECT_EQ(t.header.front(), "eps");
  EXPECT_EQ(t.rows.size(), eps.size());
}

TEST(AlphaComparison, DissipationIsMonotoneInAlpha) {
  SimConfig cfg = small_config();
  cfg.n = 32;
  cfg.t_end = 0.5;
  cfg.random = {12, 2.0, 3.0, 1.0};
  const std::vector<double> alphas{1.5, 1.0, 1.25, 2.0};
  const SweepResult r = alpha_comparison(cfg, alphas, 1e-2);
  EXPECT_EQ(r.values, (std::vector<double>{1.0, 1.25, 1.5, 2.0}));
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(
        std::find(r.outcome_names.begin(), r.outcome_names.end(), name) - r.outcome_names.begin());
  };
  for (std::size_t i = 1; i < r.values.size(); ++i) {
    EXPECT_GE(r.outcomes[i][col("dissipated")], r.outcomes[i - 1][col("dissipated")]);
    EXPECT_GE(r.outcomes[i][col("hyper_dissipated")], r.outcomes[i - 1][col("hyper_dissipated")]);
  }
  EXPECT_LE(r.outcomes[2][col("sup_enstrophy")], r.outcomes[1][col("sup_enstrophy")]);
  EXPECT_TRUE(std::isnan(r.outcomes[0][col("defect_low")]));
  EXPECT_LE(r.outcomes[1][col("defect_low")], r.outcomes[1][col("defect_bound")]);
  const CsvTable spectra = final_spectra_table(r);
  EXPECT_EQ(spectra.header.size(), 5u);
}

TEST(AlphaComparison, SingleAlphaAndBadAlpha) {
  const SimConfig cfg = small_config();
  const std::vector<double> one{1.25};
  const SweepResult r = alpha_comparison(cfg, one, 1e-3);
  EXPECT_EQ(r.values.size(), 1u);
  EXPECT_FALSE(r.fit.has_value());
  const std::vector<double> bad{0.5, 1.5};
  const SweepResult s = alpha_comparison(cfg, bad, 1e-3);
  EXPECT_FALSE(s.runs[0].error.empty());
  EXPECT_TRUE(std::isnan(s.outcomes[0][0]));
  EXPECT_TRUE(s.runs[1].error.empty());
}

TEST(KernelStudy, ClassifiesTheInterpolatingFamily) {
  SimConfig cfg = small_config();
  cfg.n = 64;
  const std::vector<std::string> specs{"kernel-gaussian:1", "laplacian", "riesz:1.25", "kernel-const:-1",
                                       "first-order:0"};
  const auto rows = kernel_interpolation_study(cfg, specs);
  ASSERT_EQ(rows.size(), specs.size());
  EXPECT_EQ(rows[0].order, "bounded");
  EXPECT_EQ(rows[1].order, "laplacian");
  EXPECT_NEAR(rows[1].classification.alpha_hat, 1.0, 0.02);
  EXPECT_EQ(rows[2].order, "hyperdissipative");
  EXPECT_NEAR(rows[2].classification.alpha_hat, 1.25, 0.02);
  EXPECT_LE(rows[2].budget_residual, 1e-6);
  EXPECT_TRUE(rows[3].refused);
  EXPECT_EQ(rows[3].order, "refused");
  EXPECT_EQ(rows[4].order, "first-order");
  std::ostringstream out;
  write_kernel_study(out, rows);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "spec,status,tag,order,alpha_hat,c0_hat,c1_hat,magnitude_slope,fit_residual,budget_residual");
  const std::vector<std::string> two{"laplacian", "riesz:1.25"};
  EXPECT_THROW(kernel_interpolation_study(cfg, two), std::invalid_argument);
}
