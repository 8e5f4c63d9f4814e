#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperns/csv.hpp"
#include "hyperns/dynamics.hpp"

namespace hyperns {

/// u_lambda with mode kappa moved to lambda kappa and amplitude
/// lambda^{2 alpha - 1}: the scaling u_lambda(x) = lambda^{2 alpha - 1} u(lambda x).
struct DilationResult {
  SpectralVelocity u;
  int lambda = 1;
  double alpha = 0.0;
  /// 4 alpha - 2 - dim: ||u_lambda||^2 / ||u||^2 = lambda^{norm_exponent},
  /// with ||u_lambda|| measured over one period cell (L/lambda)^dim.
  double norm_exponent = 0.0;
};

/// Throws std::invalid_argument for lambda < 1 or when a dilated mode
/// leaves the non-Nyquist part of the lattice.
DilationResult dilate(const SpectralVelocity& u, int lambda, double alpha);

/// L^2 norm of the dilated field over its period cell (L/lambda)^dim.
double cell_l2_norm(const DilationResult& d);

/// ||F(u_lambda) - lambda^{4 alpha - 1} D(F(u))|| / ||F(u_lambda)|| with
/// F(v) = -B(v) - mu M v, M = |k|^{2 alpha}, and D the dilation without the
/// amplitude factor. Returns 0 when F(u_lambda) vanishes identically.
/// Throws std::invalid_argument when 2 lambda times the support of u
/// exceeds the dealias cutoff (the products would be truncated).
double scaling_covariance_residual(const SpectralVelocity& u, int lambda, double alpha, double mu);

/// Largest |kappa_i| carrying a coefficient above 1e-13 of the largest one.
int spectral_support(const SpectralVelocity& u);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;  // log10 y at log10 x = 0
  double rms = 0.0;
  std::size_t points = 0;
};

/// Least squares of log10 y on log10 x. Needs at least 4 positive points.
LogLogFit fit_log_log(std::span<const double> x, std::span<const double> y);

/// Summary of one run inside a sweep.
struct SweepRun {
  double parameter = 0.0;
  RunStatus status = RunStatus::completed;
  /// Empty on success; the error text when the run could not be set up.
  std::string error;
  std::vector<DefectSplit> defects;
  double budget_max_interval = 0.0;
  /// eps int <Mu, u> dt by the trapezoid rule on the per-step budget.
  double hyper_dissipated = std::numeric_limits<double>::quiet_NaN();
  std::vector<ShellEnergy> final_spectrum;
  std::optional<std::filesystem::path> directory;
};

struct SweepResult {
  std::string parameter;
  std::vector<double> values;
  std::vector<std::string> outcome_names;
  /// outcomes[i][j] is outcome j of values[i].
  std::vector<std::vector<double>> outcomes;
  std::vector<SweepRun> runs;
  std::optional<LogLogFit> fit;
  /// Largest parameter from which every consecutive log-log slope down to
  /// the smallest value stays within 0.1 of the fitted slope; NaN without a fit.
  double asymptotic_onset = std::numeric_limits<double>::quiet_NaN();

  /// parameter column followed by the outcomes.
  CsvTable table() const;
};

struct SweepOptions {
  /// When set, every run writes a run directory under this root.
  std::optional<std::filesystem::path> run_root;
  /// Extra defect-split eta values per run.
  std::vector<double> defect_etas;
  /// Run independent members concurrently.
  bool parallel = true;
};

/// Threshold on the reference run's tail fraction (energy in shells above
/// two thirds of the dealias cutoff over total energy).
inline constexpr double kTailFractionLimit = 1e-8;

/// Energy fraction in shells above 2/3 of the dealias cutoff.
double spectral_tail_fraction(const SpectralVelocity& u);

/// sup over paired samples of ||a_i - b_i||_{H^order} (inhomogeneous).
/// Throws std::invalid_argument when the sample times differ.
double sup_sobolev_distance(std::span<const SpectralVelocity> a, std::span<const SpectralVelocity> b, double order);

/// Runs the eps = 0 reference and one run per eps from identical data up to
/// T and reports err(eps) = sup_t ||u^eps - u^0||_{H^{s-1}} with a log-log
/// fit. Outcomes: error, dissipated, tail_fraction (of that run), then
/// low, high and bound at cfg.eta.
///
/// eps_list must hold >= 4 distinct positive values spanning >= 2 decades.
/// Throws NumericalError when the reference run fails or its tail fraction
/// exceeds kTailFractionLimit.
SweepResult vanishing_eps_sweep(const SimConfig& base, std::span<const double> eps_list, double s, double T,
                                const SweepOptions& options = {});

/// Runs base with power(mu, alpha) for each alpha (sorted ascending) at the
/// given eps. alpha = 1 runs the Laplacian-order baseline nu + eps mu.
/// Outcomes: sup_enstrophy, hyper_dissipated, dissipated, defect_low,
/// defect_high, defect_bound. Failed runs keep NaN outcomes and their
/// status; the sweep continues.
SweepResult alpha_comparison(const SimConfig& base, std::span<const double> alpha_list, double eps,
                             const SweepOptions& options = {});

/// Final shell spectra of a sweep: column shell, then E_<parameter>=<value>
/// per run (NaN where a run has fewer shells or failed).
CsvTable final_spectra_table(const SweepResult& sweep);

struct KernelStudyRow {
  std::string spec;
  bool refused = false;
  std::string message;
  SymbolClass classification;
  std::string order;  // bounded, first-order, laplacian, hyperdissipative or unclassified
  /// Budget residual of a short run, NaN unless the symbol is hyperdissipative.
  double budget_residual = 0.0;
};

/// Classifies each multiplier spec (parse_multiplier_spec grammar) on the
/// base lattice over the dealias band; hyperdissipative kernel or power
/// symbols also get a short run from the base data with eps = base.eps
/// (or 1e-3 when zero). Needs at least 3 specs.
std::vector<KernelStudyRow> kernel_interpolation_study(const SimConfig& base, std::span<const std::string> specs);

/// CSV with columns spec, status, tag, order, alpha_hat, c0_hat, c1_hat,
/// magnitude_slope, fit_residual, budget_residual.
void write_kernel_study(std::ostream& out, std::span<const KernelStudyRow> rows);

}  // namespace hyperns
