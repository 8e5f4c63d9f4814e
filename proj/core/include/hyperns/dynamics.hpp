#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hyperns/diagnostics.hpp"
#include "hyperns/spectral_field.hpp"
#include "hyperns/symbols.hpp"

namespace hyperns {

/// Which dissipation symbol a configuration asks for.
struct SymbolChoice {
  enum class Kind { power, kernel, table };
  Kind kind = Kind::power;
  /// CSV path for kernel / table symbols.
  std::string path;
  double mu = 1.0;
  /// Required for power symbols; NaN when unset.
  double alpha = std::numeric_limits<double>::quiet_NaN();
};

struct InitialConditionSpec {
  enum class Kind { preset, snapshot, random };
  Kind kind = Kind::random;
  /// Preset name ("taylor-green-2d", "taylor-green-3d") or snapshot path.
  std::string name;
};

/// Gaussian random data with |u^(k)| ~ |k|^sigma exp(-|k|^2 / k_c^2),
/// projected, restricted to the dealiased band and scaled to RMS velocity
/// `amplitude`.
struct RandomSpectrum {
  std::uint64_t seed = 0;
  double sigma = 2.0;
  double k_c = 4.0;
  double amplitude = 1.0;
};

struct SimConfig {
  double nu = 1.0;
  double eps = 0.0;
  SymbolChoice symbol;
  int n = 32;
  int dim = 2;
  double box_length = 2.0 * std::numbers::pi;
  double dt = 1e-3;
  double t_end = 1.0;
  int output_every = 10;
  InitialConditionSpec ic;
  /// Seed/shape of random data; amplitude also scales the presets.
  RandomSpectrum random;
  /// Sobolev order used by smallness probes.
  double s = 3.0;
  /// Default frequency fraction for defect splits.
  double eta = 0.5;
  /// false runs the linear problem (B = 0).
  bool nonlinear = true;

  Lattice lattice() const { return Lattice::build(n, dim, box_length); }
  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// Builds the configured symbol on the lattice (reading CSVs if needed).
MultiplierSymbol make_symbol(const SimConfig& cfg, const Lattice& lattice);

/// Initial velocity of a configuration, dealiased onto the lattice.
SpectralVelocity make_initial_condition(const SimConfig& cfg, const Lattice& lattice);
SpectralVelocity taylor_green(const Lattice& lattice, double amplitude = 1.0);
SpectralVelocity random_velocity(const Lattice& lattice, const RandomSpectrum& spectrum);

struct TrajectoryState {
  SpectralVelocity u;
  double t = 0.0;
  long step_index = 0;
  /// dt max_x|u| k_max of the step that produced this state.
  double cfl_estimate = 0.0;
};

/// Advective CFL bound on dt max_x|u| k_max, with k_max = floor(n/3) k_unit.
inline constexpr double kCflLimit = 1.5;

/// Pseudospectral B(u) = dealias(P div(u (x) u)) with reusable workspace.
/// Not thread-safe; use one instance per thread.
class NonlinearTerm {
 public:
  explicit NonlinearTerm(const Lattice& lattice);

  /// Writes B(u) into `out` and returns max_x |u(x)|.
  double evaluate(const SpectralVectorField& u, SpectralVectorField& out);

 private:
  Lattice lattice_;
  /// Grid the products are formed on. When 3 divides n the retained band
  /// reaches n/3 and sums of two retained modes can wrap back into it, so
  /// the products go to an n + 2 grid instead.
  Lattice grid_;
  FourierTransform fft_;
  /// Band mode of lattice_ to its storage index on grid_.
  std::vector<std::size_t> embed_;
  std::vector<Complex> spectral_;
  std::vector<std::vector<double>> physical_;
  std::vector<double> product_;
  std::vector<Complex> product_hat_;
};

/// One-shot B(u); the result is divergence-free and dealiased.
SpectralVelocity nonlinear_term(const SpectralVelocity& u);

/// exp(-(nu |k|^2 + eps m(k)) dt) at every mode; 1 at k = 0.
std::vector<double> linear_propagator(const Lattice& lattice, const MultiplierSymbol& symbol, double nu, double eps,
                                      double dt);

/// Integrating-factor RK4 for u' = -B(u) - (nu |k|^2 + eps m) u: classical
/// RK4 on v = e^{Lambda t} u^, so the linear part is exact.
class Integrator {
 public:
  Integrator(const Lattice& lattice, const MultiplierSymbol& symbol, double nu, double eps, double dt,
             bool nonlinear = true);

  /// Throws CflError (state untouched) when dt max|u| k_max > 1.5, and
  /// NumericalError when the new state is not finite.
  TrajectoryState step(const TrajectoryState& state);

  double dt() const { return dt_; }
  const Lattice& lattice() const { return lattice_; }
  double k_max() const { return lattice_.dealias_cutoff() * lattice_.k_unit(); }

 private:
  void rhs(const SpectralVectorField& u, SpectralVectorField& out, double* max_speed);

  Lattice lattice_;
  double dt_;
  bool nonlinear_;
  std::vector<double> full_;
  std::vector<double> half_;
  NonlinearTerm nonlinear_term_;
  SpectralVectorField k1_, k2_, k3_, k4_, stage_;
};

/// Single step with a freshly built integrator.
TrajectoryState step(const TrajectoryState& state, const SimConfig& cfg);

enum class RunStatus { completed, cfl_violation, non_finite };
std::string to_string(RunStatus status);

/// Called every output_every steps (and at the start and end).
using DiagnosticSink = std::function<void(const TrajectoryState&, const DiagnosticsRecord&)>;

struct RunOptions {
  /// Extra eta values for defect splits, in addition to cfg.eta. Splits are
  /// only tracked when eps > 0 and the symbol has a growth order.
  std::vector<double> defect_etas;
  /// Called after every accepted step.
  std::function<void(const TrajectoryState&)> on_step;
};

struct RunResult {
  RunStatus status = RunStatus::completed;
  std::string message;
  /// Set on CFL refusal.
  double admissible_dt = 0.0;
  /// Last good state.
  TrajectoryState final_state;
  std::vector<DiagnosticsRecord> records;
  /// Per-step budget samples, including t = 0.
  std::vector<BudgetSample> budget;
  std::vector<DefectSplit> defects;
  DissipationModel model;
};

/// Integrates from the configured initial condition to t_end.
RunResult run(const SimConfig& cfg, std::span<const DiagnosticSink> sinks = {}, const RunOptions& options = {});
/// Same, from explicit data and symbol (the configured ic is ignored).
RunResult run(const SimConfig& cfg, const SpectralVelocity& initial, const MultiplierSymbol& symbol,
              std::span<const DiagnosticSink> sinks = {}, const RunOptions& options = {});

struct SmallnessReport {
  double initial_norm = 0.0;  // inhomogeneous ||u0||_{H^s}
  /// max_t ||u(t)||_{H^s} / ||u0||_{H^s}; 0 for zero data.
  double max_ratio = 0.0;
  bool small_data_regime = false;
  RunStatus status = RunStatus::completed;
};

/// Runs cfg and monitors ||u(t)||_{H^s}; the small-data flag is raised when
/// the ratio stays <= 2. Requires s > 5/2 in 3-D and s > 2 in 2-D.
SmallnessReport smallness_probe(const SimConfig& cfg, double s);

}  // namespace hyperns
