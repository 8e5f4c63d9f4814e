#pragma once

#include <span>
#include <vector>

#include "hyperns/csv.hpp"
#include "hyperns/spectral_field.hpp"
#include "hyperns/symbols.hpp"

namespace hyperns {

/// Everything needed to evaluate the energy law of one run:
/// dE/dt = -nu ||grad u||^2 - eps <Mu, u>.
struct DissipationModel {
  double nu = 0.0;
  double eps = 0.0;
  /// m(k) on the lattice, storage order.
  std::vector<double> m;
  /// Growth order used for the crossover frequency; NaN when the symbol is
  /// not hyperdissipative on this lattice.
  double alpha = 0.0;
  /// Constant C in eps m(k) <= C eta^{2 alpha - 2} nu |k|^2 below eta R.
  double bound_constant = 1.0;
  /// True for pure power symbols (C = mu is exact); false when C comes from
  /// the classifier's fitted upper envelope.
  bool bound_certified = false;
};

/// Power symbols use their own alpha and C = mu. Other symbols are
/// classified over the dealiased band and use alpha_hat and C = c1_hat.
DissipationModel make_dissipation_model(const Lattice& lattice, const MultiplierSymbol& symbol, double nu,
                                        double eps);

struct EnergyTerms {
  double energy = 0.0;       // 1/2 ||u||^2
  double enstrophy = 0.0;    // 1/2 ||grad u||^2
  double visc_rate = 0.0;    // nu ||grad u||^2
  double hyper_rate = 0.0;   // eps <Mu, u>
  double dissipation() const { return visc_rate + hyper_rate; }
};

EnergyTerms energy_terms(const SpectralVelocity& u, const DissipationModel& model);

struct ShellEnergy {
  int shell = 0;  // integer radius in units of k_unit
  double energy = 0.0;
};

/// E(s) = L^dim sum_{s-1/2 < |kappa| <= s+1/2} 1/2 |u^(k)|^2 for s = 0..max.
std::vector<ShellEnergy> shell_spectrum(const SpectralVelocity& u);

struct DiagnosticsRecord {
  double t = 0.0;
  double energy = 0.0;
  double enstrophy = 0.0;
  double visc_dissipation_rate = 0.0;
  double hyper_dissipation_rate = 0.0;
  /// |E(t) - E(0) + int_0^t D| / E(0) from the run's per-step budget.
  double budget_residual = 0.0;
  std::vector<ShellEnergy> shell_spectrum;
};

struct BudgetSample {
  double t = 0.0;
  double energy = 0.0;
  double visc_rate = 0.0;
  double hyper_rate = 0.0;
};

struct BudgetReport {
  /// |E_{i+1} - E_i + trapezoid_i(D)| / E(0) per consecutive pair.
  std::vector<double> interval_residuals;
  /// |E_i - E_0 + trapezoid_0^i(D)| / E(0).
  std::vector<double> cumulative_residuals;
  double max_interval = 0.0;
  double max_cumulative = 0.0;
};

/// Throws std::invalid_argument unless timestamps strictly increase.
BudgetReport energy_budget(std::span<const BudgetSample> samples);
BudgetReport energy_budget(std::span<const SpectralVelocity> states, const DissipationModel& model);

BudgetSample budget_sample(const SpectralVelocity& u, const DissipationModel& model);

/// R = (nu / eps)^{1 / (2 alpha - 2)}; +infinity when eps == 0.
/// Throws std::invalid_argument for eps < 0, nu <= 0 or alpha <= 1.
double crossover_frequency(double nu, double eps, double alpha);

struct DefectSplit {
  double eta = 0.5;
  double crossover = 0.0;
  /// eps int sum_{|k| <= eta R} m |u^|^2 L^dim dt
  double low = 0.0;
  /// the same over |k| > eta R
  double high = 0.0;
  /// C eta^{2 alpha - 2} nu int ||grad u||^2 dt
  double bound_rhs = 0.0;
  double bound_constant = 1.0;
  bool bound_certified = false;
  double t_end = 0.0;
};

/// Instantaneous integrands of a DefectSplit.
struct DefectSample {
  double t = 0.0;
  double low_rate = 0.0;
  double high_rate = 0.0;
  double visc_rate = 0.0;
};

DefectSample defect_sample(const SpectralVelocity& u, const DissipationModel& model, double eta);

/// Trapezoid accumulation of defect samples in time order.
class DefectAccumulator {
 public:
  /// Throws std::invalid_argument for eta outside (0,1), eps <= 0 or a
  /// model without a growth order.
  DefectAccumulator(const DissipationModel& model, double eta);

  void add(const SpectralVelocity& u);
  DefectSplit result() const;
  double eta() const { return eta_; }

 private:
  DissipationModel model_;
  double eta_;
  bool has_prev_ = false;
  DefectSample prev_{};
  double low_ = 0.0, high_ = 0.0, visc_ = 0.0;
};

/// Low/high split of the time-integrated hyperdissipation over samples with
/// t <= t_end.
DefectSplit defect_split(std::span<const SpectralVelocity> trajectory, const DissipationModel& model, double eta,
                         double t_end);

/// lambda(k) = nu k^2 + mu k^{2 alpha}.
std::vector<double> linear_damping_curve(double nu, double mu, double alpha, std::span<const double> k_list);
/// E(t; k0) = exp(-2 (nu k0^2 + mu k0^{2 alpha}) t).
std::vector<double> mode_decay_curve(double nu, double mu, double alpha, double k0, std::span<const double> t_list);

/// Columns k, lambda_alpha=<a> for each alpha.
CsvTable damping_table(double nu, double mu, std::span<const double> alphas, std::span<const double> k_list);
/// Columns t, E_alpha=<a> for each alpha at fixed k0.
CsvTable decay_table(double nu, double mu, std::span<const double> alphas, double k0, std::span<const double> t_list);

}  // namespace hyperns
