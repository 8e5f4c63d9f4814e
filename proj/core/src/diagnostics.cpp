#include "hyperns/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hyperns {

namespace {

double mode_energy(const SpectralVelocity& u, std::size_t f) {
  double mag2 = 0.0;
  for (int i = 0; i < u.components(); ++i) mag2 += std::norm(u.component(i)[f]);
  return mag2;
}

std::string alpha_label(const char* prefix, double alpha) { return std::string(prefix) + format_double(alpha); }

}  // namespace

DissipationModel make_dissipation_model(const Lattice& lattice, const MultiplierSymbol& symbol, double nu,
                                        double eps) {
  DissipationModel model;
  model.nu = nu;
  model.eps = eps;
  model.m = symbol.tabulate(lattice);
  if (const PowerLawSpec* p = symbol.power_law()) {
    model.alpha = p->alpha;
    model.bound_constant = p->mu;
    model.bound_certified = true;
    return model;
  }
  model.alpha = std::numeric_limits<double>::quiet_NaN();
  model.bound_certified = false;
  try {
    const SymbolClass cls = classify(symbol.multiplier(), lattice, dealias_band(lattice));
    if (cls.tag == SymbolTag::hyperdissipative) {
      model.alpha = cls.alpha_hat;
      model.bound_constant = cls.c1_hat;
    }
  } catch (const std::invalid_argument&) {
    // Too few shells to classify: no growth order, so no defect bound.
  }
  return model;
}

EnergyTerms energy_terms(const SpectralVelocity& u, const DissipationModel& model) {
  const Lattice& lat = u.lattice();
  double e = 0.0, grad = 0.0, hyper = 0.0;
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const double mag2 = mode_energy(u, f);
    e += mag2;
    grad += lat.k_squared(f) * mag2;
    hyper += model.m[f] * mag2;
  }
  const double vol = lat.volume();
  EnergyTerms out;
  out.energy = 0.5 * vol * e;
  out.enstrophy = 0.5 * vol * grad;
  out.visc_rate = model.nu * vol * grad;
  out.hyper_rate = model.eps * vol * hyper;
  return out;
}

std::vector<ShellEnergy> shell_spectrum(const SpectralVelocity& u) {
  const Lattice& lat = u.lattice();
  int max_shell = 0;
  for (std::size_t f = 0; f < lat.size(); ++f) {
    max_shell = std::max(max_shell, static_cast<int>(std::lround(std::sqrt(lat.kappa_squared(f)))));
  }
  std::vector<ShellEnergy> spectrum(static_cast<std::size_t>(max_shell) + 1);
  for (int s = 0; s <= max_shell; ++s) spectrum[static_cast<std::size_t>(s)].shell = s;
  // |kappa|^2 is an integer, so |kappa| never sits exactly on s + 1/2.
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const auto s = static_cast<std::size_t>(std::lround(std::sqrt(lat.kappa_squared(f))));
    spectrum[s].energy += 0.5 * mode_energy(u, f);
  }
  for (auto& e : spectrum) e.energy *= lat.volume();
  return spectrum;
}

BudgetSample budget_sample(const SpectralVelocity& u, const DissipationModel& model) {
  const EnergyTerms terms = energy_terms(u, model);
  return {u.time(), terms.energy, terms.visc_rate, terms.hyper_rate};
}

BudgetReport energy_budget(std::span<const BudgetSample> samples) {
  BudgetReport report;
  if (samples.empty()) return report;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].t > samples[i - 1].t)) {
      throw std::invalid_argument("energy_budget: sample times are not strictly increasing");
    }
  }
  const double e0 = samples.front().energy;
  report.cumulative_residuals.push_back(0.0);
  double integral = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const auto& a = samples[i - 1];
    const auto& b = samples[i];
    const double trap = 0.5 * (b.t - a.t) * (a.visc_rate + a.hyper_rate + b.visc_rate + b.hyper_rate);
    integral += trap;
    const double interval = e0 > 0.0 ? std::abs(b.energy - a.energy + trap) / e0 : 0.0;
    const double cumulative = e0 > 0.0 ? std::abs(b.energy - e0 + integral) / e0 : 0.0;
    report.interval_residuals.push_back(interval);
    report.cumulative_residuals.push_back(cumulative);
    report.max_interval = std::max(report.max_interval, interval);
    report.max_cumulative = std::max(report.max_cumulative, cumulative);
  }
  return report;
}

BudgetReport energy_budget(std::span<const SpectralVelocity> states, const DissipationModel& model) {
  std::vector<BudgetSample> samples;
  samples.reserve(states.size());
  for (const auto& u : states) samples.push_back(budget_sample(u, model));
  return energy_budget(samples);
}

double crossover_frequency(double nu, double eps, double alpha) {
  if (!(nu > 0.0)) throw std::invalid_argument("crossover_frequency: nu must be positive");
  if (!(eps >= 0.0)) throw std::invalid_argument("crossover_frequency: eps must be nonnegative");
  if (!(alpha > 1.0)) throw std::invalid_argument("crossover_frequency: alpha must exceed 1");
  if (eps == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(nu / eps, 1.0 / (2.0 * alpha - 2.0));
}

DefectSample defect_sample(const SpectralVelocity& u, const DissipationModel& model, double eta) {
  const Lattice& lat = u.lattice();
  const double cutoff = eta * crossover_frequency(model.nu, model.eps, model.alpha);
  const double cutoff2 = cutoff * cutoff;
  double low = 0.0, high = 0.0, grad = 0.0;
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const double mag2 = mode_energy(u, f);
    const double k2 = lat.k_squared(f);
    grad += k2 * mag2;
    if (k2 <= cutoff2) {
      low += model.m[f] * mag2;
    } else {
      high += model.m[f] * mag2;
    }
  }
  const double vol = lat.volume();
  return {u.time(), model.eps * vol * low, model.eps * vol * high, model.nu * vol * grad};
}

DefectAccumulator::DefectAccumulator(const DissipationModel& model, double eta) : model_(model), eta_(eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("defect_split: eta must lie in (0,1)");
  if (!(model.eps > 0.0)) throw std::invalid_argument("defect_split: eps must be positive");
  if (!(model.alpha > 1.0)) throw std::invalid_argument("defect_split: symbol has no growth order alpha > 1");
}

void DefectAccumulator::add(const SpectralVelocity& u) {
  const DefectSample s = defect_sample(u, model_, eta_);
  if (has_prev_) {
    const double h = 0.5 * (s.t - prev_.t);
    low_ += h * (prev_.low_rate + s.low_rate);
    high_ += h * (prev_.high_rate + s.high_rate);
    visc_ += h * (prev_.visc_rate + s.visc_rate);
  }
  prev_ = s;
  has_prev_ = true;
}

DefectSplit DefectAccumulator::result() const {
  DefectSplit out;
  out.eta = eta_;
  out.crossover = crossover_frequency(model_.nu, model_.eps, model_.alpha);
  out.low = low_;
  out.high = high_;
  out.bound_constant = model_.bound_constant;
  out.bound_certified = model_.bound_certified;
  out.bound_rhs = model_.bound_constant * std::pow(eta_, 2.0 * model_.alpha - 2.0) * visc_;
  out.t_end = has_prev_ ? prev_.t : 0.0;
  return out;
}

DefectSplit defect_split(std::span<const SpectralVelocity> trajectory, const DissipationModel& model, double eta,
                         double t_end) {
  DefectAccumulator acc(model, eta);
  double last = -std::numeric_limits<double>::infinity();
  for (const auto& u : trajectory) {
    if (u.time() > t_end) break;
    if (!(u.time() > last)) throw std::invalid_argument("defect_split: trajectory times are not increasing");
    last = u.time();
    acc.add(u);
  }
  return acc.result();
}

std::vector<double> linear_damping_curve(double nu, double mu, double alpha, std::span<const double> k_list) {
  std::vector<double> out;
  out.reserve(k_list.size());
  for (double k : k_list) out.push_back(nu * k * k + mu * std::pow(k, 2.0 * alpha));
  return out;
}

std::vector<double> mode_decay_curve(double nu, double mu, double alpha, double k0, std::span<const double> t_list) {
  const double rate = nu * k0 * k0 + mu * std::pow(k0, 2.0 * alpha);
  std::vector<double> out;
  out.reserve(t_list.size());
  for (double t : t_list) out.push_back(std::exp(-2.0 * rate * t));
  return out;
}

CsvTable damping_table(double nu, double mu, std::span<const double> alphas, std::span<const double> k_list) {
  CsvTable table;
  table.header.push_back("k");
  std::vector<std::vector<double>> cols;
  for (double a : alphas) {
    table.header.push_back(alpha_label("lambda_alpha=", a));
    cols.push_back(linear_damping_curve(nu, mu, a, k_list));
  }
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    std::vector<double> row{k_list[i]};
    for (const auto& c : cols) row.push_back(c[i]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable decay_table(double nu, double mu, std::span<const double> alphas, double k0, std::span<const double> t_list) {
  CsvTable table;
  table.header.push_back("t");
  std::vector<std::vector<double>> cols;
  for (double a : alphas) {
    table.header.push_back(alpha_label("E_alpha=", a));
    cols.push_back(mode_decay_curve(nu, mu, a, k0, t_list));
  }
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    std::vector<double> row{t_list[i]};
    for (const auto& c : cols) row.push_back(c[i]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace hyperns
