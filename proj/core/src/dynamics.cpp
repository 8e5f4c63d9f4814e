#include "hyperns/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hyperns/errors.hpp"

namespace hyperns {

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(nu > 0.0) || !std::isfinite(nu)) fail("nu must be positive");
  if (!(eps >= 0.0) || !std::isfinite(eps)) fail("eps must be nonnegative");
  if (n < 4 || n % 2 != 0) fail("n must be even and >= 4");
  if (dim != 2 && dim != 3) fail("dim must be 2 or 3");
  if (!(box_length > 0.0) || !std::isfinite(box_length)) fail("box_length must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) fail("t_end must be positive");
  if (output_every < 1) fail("output_every must be a positive integer");
  if (!(eta > 0.0 && eta < 1.0)) fail("eta must lie in (0,1)");
  if (symbol.kind == SymbolChoice::Kind::power) {
    if (!(symbol.alpha > 1.0)) fail("symbol=power requires alpha > 1 (hyperdissipative order 2*alpha > 2)");
    if (!(symbol.mu > 0.0)) fail("symbol=power requires mu > 0");
  } else if (symbol.path.empty()) {
    fail("kernel/table symbols need a path");
  }
  if (ic.kind == InitialConditionSpec::Kind::preset) {
    if (ic.name == "taylor-green-2d" && dim != 2) fail("ic=taylor-green-2d requires dim = 2");
    if (ic.name == "taylor-green-3d" && dim != 3) fail("ic=taylor-green-3d requires dim = 3");
    if (ic.name != "taylor-green-2d" && ic.name != "taylor-green-3d") fail("unknown preset '" + ic.name + "'");
  }
  if (ic.kind == InitialConditionSpec::Kind::random) {
    if (!(random.k_c > 0.0)) fail("k_c must be positive");
    if (!(random.amplitude >= 0.0)) fail("amplitude must be nonnegative");
  }
}

MultiplierSymbol make_symbol(const SimConfig& cfg, const Lattice& lattice) {
  switch (cfg.symbol.kind) {
    case SymbolChoice::Kind::power: return power_symbol(cfg.symbol.mu, cfg.symbol.alpha);
    case SymbolChoice::Kind::kernel: return read_kernel_symbol(cfg.symbol.path, lattice);
    case SymbolChoice::Kind::table: return read_tabulated_symbol(cfg.symbol.path, lattice);
  }
  throw ConfigError("unknown symbol kind");
}

namespace {

Lattice product_grid(const Lattice& lattice) {
  if (3 * lattice.dealias_cutoff() < lattice.n()) return lattice;
  return Lattice::build(lattice.n() + 2, lattice.dim(), lattice.box_length());
}

}  // namespace

NonlinearTerm::NonlinearTerm(const Lattice& lattice)
    : lattice_(lattice),
      grid_(product_grid(lattice)),
      fft_(grid_),
      embed_(lattice.size()),
      spectral_(grid_.size()),
      physical_(static_cast<std::size_t>(lattice.dim()), std::vector<double>(grid_.size())),
      product_(grid_.size()),
      product_hat_(grid_.size()) {
  for (std::size_t f = 0; f < lattice.size(); ++f) embed_[f] = grid_.flat_index(lattice.mode(f));
}

double NonlinearTerm::evaluate(const SpectralVectorField& u, SpectralVectorField& out) {
  require_same_lattice(u.lattice(), lattice_, "nonlinear_term");
  require_same_lattice(out.lattice(), lattice_, "nonlinear_term");
  const int dim = lattice_.dim();
  const bool padded = grid_.n() != lattice_.n();
  for (int i = 0; i < dim; ++i) {
    auto& phys = physical_[static_cast<std::size_t>(i)];
    if (!padded) {
      fft_.inverse(u.component(i), phys);
      continue;
    }
    std::fill(spectral_.begin(), spectral_.end(), Complex(0.0));
    const auto ui = u.component(i);
    for (std::size_t f = 0; f < lattice_.size(); ++f) {
      if (lattice_.in_dealias_band(f)) spectral_[embed_[f]] = ui[f];
    }
    fft_.inverse(spectral_, phys);
  }

  const std::size_t size = grid_.size();
  double max_speed2 = 0.0;
  for (std::size_t x = 0; x < size; ++x) {
    double s2 = 0.0;
    for (int i = 0; i < dim; ++i) s2 += physical_[static_cast<std::size_t>(i)][x] * physical_[static_cast<std::size_t>(i)][x];
    max_speed2 = std::max(max_speed2, s2);
  }

  for (int i = 0; i < dim; ++i) std::fill(out.component(i).begin(), out.component(i).end(), Complex(0.0));

  // (div(u (x) u))_i = i k_j (u_i u_j)^, using the symmetry of u_i u_j.
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      const auto& ui = physical_[static_cast<std::size_t>(i)];
      const auto& uj = physical_[static_cast<std::size_t>(j)];
      for (std::size_t x = 0; x < size; ++x) product_[x] = ui[x] * uj[x];
      fft_.forward(product_, product_hat_);
      auto out_i = out.component(i);
      auto out_j = out.component(j);
      const auto& ki = lattice_.k_component(i);
      const auto& kj = lattice_.k_component(j);
      for (std::size_t f = 0; f < lattice_.size(); ++f) {
        if (!lattice_.in_dealias_band(f)) continue;
        const Complex p = product_hat_[embed_[f]];
        out_i[f] += Complex(-kj[f] * p.imag(), kj[f] * p.real());
        if (j != i) out_j[f] += Complex(-ki[f] * p.imag(), ki[f] * p.real());
      }
    }
  }
  leray_project_in_place(out);
  return std::sqrt(max_speed2);
}

SpectralVelocity nonlinear_term(const SpectralVelocity& u) {
  NonlinearTerm term(u.lattice());
  SpectralVectorField out(u.lattice());
  term.evaluate(dealias(u).field(), out);
  return SpectralVelocity::from_field(std::move(out), u.time());
}

std::vector<double> linear_propagator(const Lattice& lattice, const MultiplierSymbol& symbol, double nu, double eps,
                                      double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("linear_propagator: dt must be positive");
  const std::vector<double> m = symbol.tabulate(lattice);
  std::vector<double> factors(lattice.size());
  for (std::size_t f = 0; f < lattice.size(); ++f) {
    factors[f] = f == 0 ? 1.0 : std::exp(-(nu * lattice.k_squared(f) + eps * m[f]) * dt);
  }
  return factors;
}

Integrator::Integrator(const Lattice& lattice, const MultiplierSymbol& symbol, double nu, double eps, double dt,
                       bool nonlinear)
    : lattice_(lattice),
      dt_(dt),
      nonlinear_(nonlinear),
      full_(linear_propagator(lattice, symbol, nu, eps, dt)),
      half_(linear_propagator(lattice, symbol, nu, eps, 0.5 * dt)),
      nonlinear_term_(lattice),
      k1_(lattice),
      k2_(lattice),
      k3_(lattice),
      k4_(lattice),
      stage_(lattice) {}

void Integrator::rhs(const SpectralVectorField& u, SpectralVectorField& out, double* max_speed) {
  if (!nonlinear_) {
    for (int i = 0; i < out.components(); ++i) std::fill(out.component(i).begin(), out.component(i).end(), Complex(0.0));
    if (max_speed != nullptr) *max_speed = 0.0;
    return;
  }
  const double speed = nonlinear_term_.evaluate(u, out);
  for (int i = 0; i < out.components(); ++i) {
    for (auto& c : out.component(i)) c = -c;
  }
  if (max_speed != nullptr) *max_speed = speed;
}

TrajectoryState Integrator::step(const TrajectoryState& state) {
  require_same_lattice(state.u.lattice(), lattice_, "step");
  const SpectralVectorField& u = state.u.field();
  const int dim = lattice_.dim();
  const std::size_t size = lattice_.size();
  const double dt = dt_;

  double speed = 0.0;
  try {
    rhs(u, k1_, &speed);
  } catch (const InvariantError& e) {
    throw NumericalError(std::string("step: corrupted state: ") + e.what());
  }
  if (!std::isfinite(speed)) throw NumericalError("step: non-finite velocity");
  const double cfl = dt * speed * k_max();
  if (cfl > kCflLimit) {
    const double admissible = kCflLimit / (speed * k_max());
    std::ostringstream os;
    os << "step: advective CFL " << cfl << " exceeds " << kCflLimit << "; admissible dt <= " << admissible;
    throw CflError(os.str(), admissible);
  }

  try {
    for (int i = 0; i < dim; ++i) {
      auto s = stage_.component(i);
      auto c = u.component(i);
      auto a = k1_.component(i);
      for (std::size_t f = 0; f < size; ++f) s[f] = half_[f] * (c[f] + 0.5 * dt * a[f]);
    }
    rhs(stage_, k2_, nullptr);
    for (int i = 0; i < dim; ++i) {
      auto s = stage_.component(i);
      auto c = u.component(i);
      auto b = k2_.component(i);
      for (std::size_t f = 0; f < size; ++f) s[f] = half_[f] * c[f] + 0.5 * dt * b[f];
    }
    rhs(stage_, k3_, nullptr);
    for (int i = 0; i < dim; ++i) {
      auto s = stage_.component(i);
      auto c = u.component(i);
      auto b = k3_.component(i);
      for (std::size_t f = 0; f < size; ++f) s[f] = full_[f] * c[f] + dt * half_[f] * b[f];
    }
    rhs(stage_, k4_, nullptr);
  } catch (const InvariantError& e) {
    throw NumericalError(std::string("step: corrupted stage: ") + e.what());
  }

  SpectralVectorField next(lattice_);
  for (int i = 0; i < dim; ++i) {
    auto out = next.component(i);
    auto c = u.component(i);
    auto a = k1_.component(i);
    auto b = k2_.component(i);
    auto d = k3_.component(i);
    auto e = k4_.component(i);
    for (std::size_t f = 0; f < size; ++f) {
      out[f] = full_[f] * c[f] + (dt / 6.0) * (full_[f] * a[f] + 2.0 * half_[f] * (b[f] + d[f]) + e[f]);
    }
  }
  leray_project_in_place(next);
  next = dealias(std::move(next));

  TrajectoryState out{SpectralVelocity::zero(lattice_), state.t + dt, state.step_index + 1, cfl};
  try {
    out.u = SpectralVelocity::from_field(std::move(next), out.t);
  } catch (const InvariantError& e) {
    throw NumericalError(std::string("step: ") + e.what());
  }
  return out;
}

TrajectoryState step(const TrajectoryState& state, const SimConfig& cfg) {
  const Lattice& lat = state.u.lattice();
  Integrator integrator(lat, make_symbol(cfg, lat), cfg.nu, cfg.eps, cfg.dt, cfg.nonlinear);
  return integrator.step(state);
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::completed: return "completed";
    case RunStatus::cfl_violation: return "cfl_violation";
    case RunStatus::non_finite: return "non_finite";
  }
  return "unknown";
}

RunResult run(const SimConfig& cfg, std::span<const DiagnosticSink> sinks, const RunOptions& options) {
  cfg.validate();
  const Lattice lattice = cfg.lattice();
  const MultiplierSymbol symbol = make_symbol(cfg, lattice);
  return run(cfg, make_initial_condition(cfg, lattice), symbol, sinks, options);
}

RunResult run(const SimConfig& cfg, const SpectralVelocity& initial, const MultiplierSymbol& symbol,
              std::span<const DiagnosticSink> sinks, const RunOptions& options) {
  cfg.validate();
  const Lattice& lattice = initial.lattice();
  RunResult result{RunStatus::completed, {}, 0.0, TrajectoryState{dealias(initial), initial.time(), 0, 0.0}, {}, {},
                   {}, make_dissipation_model(lattice, symbol, cfg.nu, cfg.eps)};
  const DissipationModel& model = result.model;

  std::vector<DefectAccumulator> defects;
  if (cfg.eps > 0.0 && model.alpha > 1.0) {
    std::vector<double> etas{cfg.eta};
    for (double e : options.defect_etas) {
      if (std::find(etas.begin(), etas.end(), e) == etas.end()) etas.push_back(e);
    }
    for (double e : etas) defects.emplace_back(model, e);
  }

  Integrator integrator(lattice, symbol, cfg.nu, cfg.eps, cfg.dt, cfg.nonlinear);
  TrajectoryState state = result.final_state;

  double integral = 0.0;
  double e0 = 0.0;
  long last_recorded = -1;
  auto observe = [&](const TrajectoryState& s) {
    const BudgetSample b = budget_sample(s.u, model);
    if (result.budget.empty()) {
      e0 = b.energy;
    } else {
      const BudgetSample& prev = result.budget.back();
      integral += 0.5 * (b.t - prev.t) * (prev.visc_rate + prev.hyper_rate + b.visc_rate + b.hyper_rate);
    }
    result.budget.push_back(b);
    for (auto& acc : defects) acc.add(s.u);
  };
  auto record = [&](const TrajectoryState& s) {
    const EnergyTerms terms = energy_terms(s.u, model);
    DiagnosticsRecord rec;
    rec.t = s.t;
    rec.energy = terms.energy;
    rec.enstrophy = terms.enstrophy;
    rec.visc_dissipation_rate = terms.visc_rate;
    rec.hyper_dissipation_rate = terms.hyper_rate;
    rec.budget_residual = e0 > 0.0 ? std::abs(terms.energy - e0 + integral) / e0 : 0.0;
    rec.shell_spectrum = shell_spectrum(s.u);
    for (const auto& sink : sinks) sink(s, rec);
    result.records.push_back(std::move(rec));
    last_recorded = s.step_index;
  };

  observe(state);
  record(state);

  const double span = cfg.t_end - initial.time();
  if (!(span > 0.0)) throw ConfigError("t_end must exceed the initial time " + std::to_string(initial.time()));
  const long steps = std::max(1L, static_cast<long>(std::ceil(span / cfg.dt - 1e-9)));
  for (long k = 1; k <= steps; ++k) {
    try {
      state = integrator.step(state);
    } catch (const CflError& e) {
      result.status = RunStatus::cfl_violation;
      result.message = e.what();
      result.admissible_dt = e.admissible_dt();
      break;
    } catch (const NumericalError& e) {
      result.status = RunStatus::non_finite;
      result.message = e.what();
      break;
    }
    observe(state);
    if (options.on_step) options.on_step(state);
    if (k % cfg.output_every == 0 || k == steps) record(state);
  }
  if (last_recorded != state.step_index) record(state);

  for (const auto& acc : defects) result.defects.push_back(acc.result());
  result.final_state = std::move(state);
  return result;
}

SmallnessReport smallness_probe(const SimConfig& cfg, double s) {
  const double min_s = cfg.dim == 3 ? 2.5 : 2.0;
  if (!(s > min_s)) {
    throw std::invalid_argument("smallness_probe: need s > " + std::to_string(min_s) + " in " +
                                std::to_string(cfg.dim) + "-D");
  }
  cfg.validate();
  const Lattice lattice = cfg.lattice();
  const SpectralVelocity u0 = dealias(make_initial_condition(cfg, lattice));
  const SobolevIndex index{s, SobolevIndex::Variant::inhomogeneous};

  SmallnessReport report;
  report.initial_norm = sobolev_norm(u0, index);
  if (report.initial_norm == 0.0) {
    report.small_data_regime = true;
    return report;
  }
  report.max_ratio = 1.0;
  RunOptions options;
  options.on_step = [&](const TrajectoryState& st) {
    report.max_ratio = std::max(report.max_ratio, sobolev_norm(st.u, index) / report.initial_norm);
  };
  const RunResult r = run(cfg, u0, make_symbol(cfg, lattice), {}, options);
  report.status = r.status;
  report.small_data_regime = r.status == RunStatus::completed && report.max_ratio <= 2.0;
  return report;
}

}  // namespace hyperns
