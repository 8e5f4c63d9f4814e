#include "hyperns/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>
#include <stdexcept>

#include "hyperns/errors.hpp"
#include "hyperns/run_io.hpp"

namespace hyperns {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Moves every coefficient from kappa to lambda kappa, scaled by `factor`.
SpectralVectorField dilate_field(const SpectralVectorField& v, int lambda, double factor) {
  const Lattice& lat = v.lattice();
  const int half = lat.n() / 2;
  SpectralVectorField out(lat);
  for (std::size_t f = 0; f < lat.size(); ++f) {
    bool nonzero = false;
    for (int i = 0; i < v.components(); ++i) nonzero = nonzero || v.component(i)[f] != Complex{};
    if (!nonzero) continue;
    ModeIndex kappa = lat.mode(f);
    for (int a = 0; a < lat.dim(); ++a) {
      kappa[static_cast<std::size_t>(a)] *= lambda;
      if (std::abs(kappa[static_cast<std::size_t>(a)]) >= half) {
        throw std::invalid_argument("dilate: mode " + std::to_string(lat.mode(f)[static_cast<std::size_t>(a)]) +
                                    " on axis " + std::to_string(a) + " leaves the lattice under lambda = " +
                                    std::to_string(lambda));
      }
    }
    const std::size_t g = lat.flat_index(kappa);
    for (int i = 0; i < v.components(); ++i) out.component(i)[g] = factor * v.component(i)[f];
  }
  return out;
}

// Coefficients below this fraction of the largest one are roundoff.
constexpr double kSupportFloor = 1e-13;

double max_coefficient(const SpectralVectorField& v) {
  double peak = 0.0;
  for (int i = 0; i < v.components(); ++i) {
    for (auto c : v.component(i)) peak = std::max(peak, std::abs(c));
  }
  return peak;
}

int field_support(const SpectralVectorField& v) {
  const Lattice& lat = v.lattice();
  const double floor = kSupportFloor * max_coefficient(v);
  int support = 0;
  for (std::size_t f = 0; f < lat.size(); ++f) {
    bool above = false;
    for (int i = 0; i < v.components(); ++i) above = above || std::abs(v.component(i)[f]) > floor;
    if (!above) continue;
    const ModeIndex kappa = lat.mode(f);
    for (int a = 0; a < lat.dim(); ++a) support = std::max(support, std::abs(kappa[static_cast<std::size_t>(a)]));
  }
  return support;
}

// Zeroes every mode with some |kappa_i| > support.
SpectralVectorField truncate_to_box(const SpectralVectorField& v, int support) {
  const Lattice& lat = v.lattice();
  SpectralVectorField out(lat);
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const ModeIndex kappa = lat.mode(f);
    bool inside = true;
    for (int a = 0; a < lat.dim(); ++a) inside = inside && std::abs(kappa[static_cast<std::size_t>(a)]) <= support;
    if (!inside) continue;
    for (int i = 0; i < v.components(); ++i) out.component(i)[f] = v.component(i)[f];
  }
  return out;
}

// F(v) = -B(v) - mu |k|^{2 alpha} v
SpectralVectorField covariance_rhs(const SpectralVelocity& v, double alpha, double mu) {
  const Lattice& lat = v.lattice();
  SpectralVelocity b = nonlinear_term(v);
  SpectralVectorField out(lat);
  for (int i = 0; i < lat.dim(); ++i) {
    auto o = out.component(i);
    auto bi = b.component(i);
    auto vi = v.component(i);
    for (std::size_t f = 0; f < lat.size(); ++f) {
      const double m = mu * std::pow(lat.k_squared(f), alpha);
      o[f] = -bi[f] - m * vi[f];
    }
  }
  return out;
}

SpectralVectorField difference(const SpectralVectorField& a, const SpectralVectorField& b) {
  SpectralVectorField out(a.lattice());
  for (int i = 0; i < a.components(); ++i) {
    auto o = out.component(i);
    auto x = a.component(i);
    auto y = b.component(i);
    for (std::size_t f = 0; f < o.size(); ++f) o[f] = x[f] - y[f];
  }
  return out;
}

double trapezoid(const std::vector<BudgetSample>& budget, double (*rate)(const BudgetSample&)) {
  double total = 0.0;
  for (std::size_t i = 1; i < budget.size(); ++i) {
    total += 0.5 * (budget[i].t - budget[i - 1].t) * (rate(budget[i - 1]) + rate(budget[i]));
  }
  return total;
}

struct Member {
  std::optional<RunResult> result_;
  const RunResult& result() const { return *result_; }
  std::vector<SpectralVelocity> samples;
  std::optional<std::filesystem::path> directory;
};

Member run_member(const SimConfig& cfg, const SpectralVelocity& u0, const MultiplierSymbol& symbol,
                  const SweepOptions& options, bool keep_samples) {
  Member m;
  RunOptions ropts;
  ropts.defect_etas = options.defect_etas;
  std::vector<DiagnosticSink> sinks;
  if (keep_samples) {
    sinks.push_back([&m](const TrajectoryState& s, const DiagnosticsRecord&) { m.samples.push_back(s.u); });
  }
  std::optional<RunWriter> writer;
  if (options.run_root) {
    writer.emplace(*options.run_root, cfg);
    sinks.push_back(writer->sink());
    m.directory = writer->directory();
  }
  m.result_ = run(cfg, u0, symbol, sinks, ropts);
  if (writer) writer->finish(*m.result_);
  return m;
}

// Runs jobs in order, concurrently when asked; results keep job order.
template <typename Job>
auto fan_out(std::vector<Job>& jobs, bool parallel) {
  using R = decltype(jobs.front()());
  std::vector<R> out;
  out.reserve(jobs.size());
  if (!parallel) {
    for (auto& job : jobs) out.push_back(job());
    return out;
  }
  std::vector<std::future<R>> futures;
  futures.reserve(jobs.size());
  for (auto& job : jobs) futures.push_back(std::async(std::launch::async, job));
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

const DefectSplit* find_defect(const RunResult& r, double eta) {
  for (const auto& d : r.defects) {
    if (d.eta == eta) return &d;
  }
  return nullptr;
}

double budget_max(const RunResult& r) {
  return r.budget.size() < 2 ? 0.0 : energy_budget(r.budget).max_interval;
}

double onset_of_slope(std::span<const double> x, std::span<const double> y, double slope) {
  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  double onset = x[order[0]];
  for (std::size_t j = 1; j < order.size(); ++j) {
    const std::size_t a = order[j - 1], b = order[j];
    const double local = std::log10(y[b] / y[a]) / std::log10(x[b] / x[a]);
    if (std::abs(local - slope) > kSlopeTolerance) break;
    onset = x[b];
  }
  return onset;
}

}  // namespace

DilationResult dilate(const SpectralVelocity& u, int lambda, double alpha) {
  if (lambda < 1) throw std::invalid_argument("dilate: lambda must be a positive integer");
  const double factor = std::pow(static_cast<double>(lambda), 2.0 * alpha - 1.0);
  SpectralVectorField out = dilate_field(u.field(), lambda, factor);
  DilationResult r{SpectralVelocity::from_field(std::move(out), u.time()), lambda, alpha,
                   4.0 * alpha - 2.0 - u.lattice().dim()};
  return r;
}

double cell_l2_norm(const DilationResult& d) {
  return l2_norm(d.u.field()) * std::pow(static_cast<double>(d.lambda), -0.5 * d.u.lattice().dim());
}

int spectral_support(const SpectralVelocity& u) { return field_support(u.field()); }

double scaling_covariance_residual(const SpectralVelocity& u, int lambda, double alpha, double mu) {
  const int support = spectral_support(u);
  const int cutoff = u.lattice().dealias_cutoff();
  if (2 * lambda * support > cutoff) {
    throw std::invalid_argument("scaling_covariance_residual: doubled dilated support " +
                                std::to_string(2 * lambda * support) + " exceeds the dealias cutoff " +
                                std::to_string(cutoff));
  }
  // A box truncation of a projected Hermitian field stays projected and
  // Hermitian; it only drops roundoff left by FFT-built data.
  const SpectralVelocity base = SpectralVelocity::from_field(truncate_to_box(u.field(), support), u.time());
  const SpectralVelocity ul = dilate(base, lambda, alpha).u;
  const SpectralVectorField lhs = covariance_rhs(ul, alpha, mu);
  const double scale = std::pow(static_cast<double>(lambda), 4.0 * alpha - 1.0);
  const SpectralVectorField rhs =
      dilate_field(truncate_to_box(covariance_rhs(base, alpha, mu), 2 * support), lambda, scale);
  const double denom = l2_norm(lhs);
  const double num = l2_norm(difference(lhs, rhs));
  if (denom == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / denom;
}

LogLogFit fit_log_log(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_log_log: size mismatch");
  if (x.size() < 4) throw std::invalid_argument("fit_log_log: a slope needs at least 4 points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw std::invalid_argument("fit_log_log: values must be positive and finite");
    }
    lx[i] = std::log10(x[i]);
    ly[i] = std::log10(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_log_log: x values must not all coincide");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / static_cast<double>(n));
  fit.points = n;
  return fit;
}

CsvTable SweepResult::table() const {
  CsvTable t;
  t.header.push_back(parameter);
  t.header.insert(t.header.end(), outcome_names.begin(), outcome_names.end());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::vector<double> row{values[i]};
    row.insert(row.end(), outcomes[i].begin(), outcomes[i].end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

double spectral_tail_fraction(const SpectralVelocity& u) {
  const double threshold = 2.0 * u.lattice().dealias_cutoff() / 3.0;
  double total = 0.0, tail = 0.0;
  for (const auto& s : shell_spectrum(u)) {
    total += s.energy;
    if (s.shell > threshold) tail += s.energy;
  }
  return total > 0.0 ? tail / total : 0.0;
}

double sup_sobolev_distance(std::span<const SpectralVelocity> a, std::span<const SpectralVelocity> b, double order) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_sobolev_distance: sample counts differ");
  const SobolevIndex index{order, SobolevIndex::Variant::inhomogeneous};
  double sup = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].time() != b[i].time()) throw std::invalid_argument("sup_sobolev_distance: sample times differ");
    require_same_lattice(a[i].lattice(), b[i].lattice(), "sup_sobolev_distance");
    sup = std::max(sup, sobolev_norm(difference(a[i].field(), b[i].field()), index));
  }
  return sup;
}

SweepResult vanishing_eps_sweep(const SimConfig& base, std::span<const double> eps_list, double s, double T,
                                const SweepOptions& options) {
  if (eps_list.size() < 4) throw std::invalid_argument("vanishing_eps_sweep: need at least 4 eps values");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw std::invalid_argument("vanishing_eps_sweep: eps values must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw std::invalid_argument("vanishing_eps_sweep: eps values must be strictly decreasing");
    }
  }
  if (eps_list.front() / eps_list.back() < 100.0 * (1.0 - 1e-12)) {
    throw std::invalid_argument("vanishing_eps_sweep: eps values must span at least two decades");
  }
  if (!(T > 0.0)) throw std::invalid_argument("vanishing_eps_sweep: T must be positive");

  base.validate();
  const Lattice lattice = base.lattice();
  const MultiplierSymbol symbol = make_symbol(base, lattice);
  const SpectralVelocity u0 = dealias(make_initial_condition(base, lattice));

  auto member_cfg = [&](double eps) {
    SimConfig cfg = base;
    cfg.eps = eps;
    cfg.t_end = u0.time() + T;
    return cfg;
  };

  std::vector<std::function<Member()>> jobs;
  jobs.push_back([&] { return run_member(member_cfg(0.0), u0, symbol, options, true); });
  for (double eps : eps_list) {
    jobs.push_back([&, eps] { return run_member(member_cfg(eps), u0, symbol, options, true); });
  }
  std::vector<Member> members = fan_out(jobs, options.parallel);

  const Member& ref = members.front();
  if (ref.result().status != RunStatus::completed) {
    throw NumericalError("vanishing_eps_sweep: reference run halted: " + ref.result().message);
  }
  double ref_tail = 0.0;
  for (const auto& u : ref.samples) ref_tail = std::max(ref_tail, spectral_tail_fraction(u));
  if (ref_tail > kTailFractionLimit) {
    throw NumericalError("vanishing_eps_sweep: reference run under-resolved before T (tail fraction " +
                         format_double(ref_tail) + " > " + format_double(kTailFractionLimit) + ")");
  }

  SweepResult out;
  out.parameter = "eps";
  out.outcome_names = {"error", "dissipated", "tail_fraction", "defect_low", "defect_high", "defect_bound"};
  std::vector<double> errors;
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    const Member& m = members[i + 1];
    if (m.result().status != RunStatus::completed) {
      throw NumericalError("vanishing_eps_sweep: run at eps = " + format_double(eps_list[i]) +
                           " halted: " + m.result().message);
    }
    const double err = sup_sobolev_distance(m.samples, ref.samples, s - 1.0);
    double tail = 0.0;
    for (const auto& u : m.samples) tail = std::max(tail, spectral_tail_fraction(u));
    const auto& budget = m.result().budget;
    const double dissipated = budget.front().energy - budget.back().energy;
    const DefectSplit* d = find_defect(m.result(), base.eta);
    out.values.push_back(eps_list[i]);
    out.outcomes.push_back({err, dissipated, tail, d ? d->low : kNaN, d ? d->high : kNaN, d ? d->bound_rhs : kNaN});
    errors.push_back(err);

    SweepRun run_info;
    run_info.parameter = eps_list[i];
    run_info.status = m.result().status;
    run_info.defects = m.result().defects;
    run_info.budget_max_interval = budget_max(m.result());
    run_info.hyper_dissipated = trapezoid(budget, [](const BudgetSample& b) { return b.hyper_rate; });
    run_info.final_spectrum = shell_spectrum(m.result().final_state.u);
    run_info.directory = m.directory;
    out.runs.push_back(std::move(run_info));
  }

  if (std::all_of(errors.begin(), errors.end(), [](double e) { return e > 0.0; })) {
    out.fit = fit_log_log(out.values, errors);
    out.asymptotic_onset = onset_of_slope(out.values, errors, out.fit->slope);
  }
  return out;
}

SweepResult alpha_comparison(const SimConfig& base, std::span<const double> alpha_list, double eps,
                             const SweepOptions& options) {
  if (alpha_list.empty()) throw std::invalid_argument("alpha_comparison: empty alpha list");
  if (!(eps >= 0.0)) throw std::invalid_argument("alpha_comparison: eps must be nonnegative");
  std::vector<double> alphas(alpha_list.begin(), alpha_list.end());
  std::sort(alphas.begin(), alphas.end());

  SimConfig probe = base;
  probe.eps = eps;
  if (probe.symbol.kind != SymbolChoice::Kind::power || !(probe.symbol.alpha > 1.0)) {
    probe.symbol = SymbolChoice{SymbolChoice::Kind::power, "", base.symbol.mu, 2.0};
  }
  probe.validate();
  const Lattice lattice = probe.lattice();
  const SpectralVelocity u0 = dealias(make_initial_condition(probe, lattice));
  const double mu = base.symbol.mu;

  struct Outcome {
    SweepRun info;
    std::vector<double> values;
  };
  std::vector<std::function<Outcome()>> jobs;
  for (double alpha : alphas) {
    jobs.push_back([&, alpha]() -> Outcome {
      Outcome o;
      o.info.parameter = alpha;
      o.values.assign(6, kNaN);
      try {
        if (!(alpha >= 1.0)) throw std::invalid_argument("alpha must be at least 1");
        SimConfig cfg = base;
        cfg.symbol = SymbolChoice{SymbolChoice::Kind::power, "", mu, alpha};
        cfg.eps = eps;
        double hyper_share = 0.0;
        if (alpha == 1.0) {
          // eps mu |k|^2 is plain viscosity: fold it into nu and switch the
          // symbol term off (the placeholder order is then irrelevant).
          cfg.nu = base.nu + eps * mu;
          cfg.eps = 0.0;
          cfg.symbol.alpha = 2.0;
          hyper_share = eps * mu / cfg.nu;
        }
        const MultiplierSymbol symbol = make_symbol(cfg, lattice);
        Member m = run_member(cfg, u0, symbol, options, false);
        const auto& budget = m.result().budget;
        double sup_enstrophy = 0.0;
        for (const auto& b : budget) sup_enstrophy = std::max(sup_enstrophy, b.visc_rate / (2.0 * cfg.nu));
        double hyper = trapezoid(budget, [](const BudgetSample& b) { return b.hyper_rate; });
        if (alpha == 1.0) hyper = hyper_share * trapezoid(budget, [](const BudgetSample& b) { return b.visc_rate; });
        const DefectSplit* d = find_defect(m.result(), base.eta);
        o.values = {sup_enstrophy, hyper, budget.front().energy - budget.back().energy,
                    d ? d->low : kNaN, d ? d->high : kNaN, d ? d->bound_rhs : kNaN};
        o.info.status = m.result().status;
        if (m.result().status != RunStatus::completed) o.info.error = m.result().message;
        o.info.defects = m.result().defects;
        o.info.budget_max_interval = budget_max(m.result());
        o.info.hyper_dissipated = hyper;
        o.info.final_spectrum = shell_spectrum(m.result().final_state.u);
        o.info.directory = m.directory;
      } catch (const std::exception& e) {
        o.info.status = RunStatus::non_finite;
        o.info.error = e.what();
      }
      return o;
    });
  }
  std::vector<Outcome> outcomes = fan_out(jobs, options.parallel);

  SweepResult out;
  out.parameter = "alpha";
  out.outcome_names = {"sup_enstrophy", "hyper_dissipated", "dissipated", "defect_low", "defect_high",
                       "defect_bound"};
  for (auto& o : outcomes) {
    out.values.push_back(o.info.parameter);
    out.outcomes.push_back(std::move(o.values));
    out.runs.push_back(std::move(o.info));
  }
  return out;
}

CsvTable final_spectra_table(const SweepResult& sweep) {
  CsvTable t;
  t.header.push_back("shell");
  std::size_t shells = 0;
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    t.header.push_back("E_" + sweep.parameter + "=" + format_double(sweep.values[i]));
    shells = std::max(shells, sweep.runs[i].final_spectrum.size());
  }
  for (std::size_t s = 0; s < shells; ++s) {
    std::vector<double> row{static_cast<double>(s)};
    for (const auto& run : sweep.runs) {
      row.push_back(s < run.final_spectrum.size() ? run.final_spectrum[s].energy : kNaN);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<KernelStudyRow> kernel_interpolation_study(const SimConfig& base, std::span<const std::string> specs) {
  if (specs.size() < 3) throw std::invalid_argument("kernel_interpolation_study: need at least 3 kernels");
  const Lattice lattice = base.lattice();
  const Band band = dealias_band(lattice);
  std::vector<KernelStudyRow> rows;
  for (const auto& spec : specs) {
    KernelStudyRow row;
    row.spec = spec;
    row.budget_residual = kNaN;
    std::optional<MultiplierSymbol> symbol;
    std::optional<RawMultiplier> raw;
    try {
      symbol = parse_dissipative_spec(spec, lattice);
      raw = symbol ? symbol->multiplier() : parse_multiplier_spec(spec, lattice);
    } catch (const std::invalid_argument& e) {
      row.refused = true;
      row.message = e.what();
      row.order = "refused";
      rows.push_back(std::move(row));
      continue;
    }
    row.classification = classify(*raw, lattice, band);
    switch (row.classification.tag) {
      case SymbolTag::order_zero: row.order = "bounded"; break;
      case SymbolTag::first_order_imaginary: row.order = "first-order"; break;
      case SymbolTag::hyperdissipative: row.order = "hyperdissipative"; break;
      case SymbolTag::unclassified:
        row.order = std::abs(row.classification.magnitude_slope - 2.0) <= kSlopeTolerance ? "laplacian"
                                                                                          : "unclassified";
        break;
    }
    if (row.classification.tag == SymbolTag::hyperdissipative && symbol) {
      try {
        SimConfig cfg = base;
        if (!(cfg.eps > 0.0)) cfg.eps = 1e-3;
        const SpectralVelocity u0 = dealias(make_initial_condition(cfg, lattice));
        cfg.t_end = u0.time() + 50.0 * cfg.dt;
        const RunResult r = run(cfg, u0, *symbol);
        row.budget_residual = budget_max(r);
        if (r.status != RunStatus::completed) row.message = r.message;
      } catch (const std::exception& e) {
        row.message = e.what();
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_kernel_study(std::ostream& out, std::span<const KernelStudyRow> rows) {
  out << "spec,status,tag,order,alpha_hat,c0_hat,c1_hat,magnitude_slope,fit_residual,budget_residual\n";
  for (const auto& r : rows) {
    out << r.spec << ',' << (r.refused ? "refused" : "accepted") << ',';
    if (r.refused) {
      out << ",refused,,,,,,\n";
      continue;
    }
    const SymbolClass& c = r.classification;
    out << to_string(c.tag) << ',' << r.order << ',' << format_double(c.alpha_hat) << ',' << format_double(c.c0_hat)
        << ',' << format_double(c.c1_hat) << ',' << format_double(c.magnitude_slope) << ','
        << format_double(c.fit_residual) << ',' << format_double(r.budget_residual) << '\n';
  }
}

}  // namespace hyperns
