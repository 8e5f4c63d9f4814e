#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <numbers>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "hyperns/config.hpp"
#include "hyperns/csv.hpp"
#include "hyperns/diagnostics.hpp"
#include "hyperns/errors.hpp"
#include "hyperns/experiments.hpp"
#include "hyperns/run_io.hpp"
#include "hyperns/symbols.hpp"

namespace hyperns::cli {

namespace {

namespace fs = std::filesystem;

struct Failure {
  ExitCode code;
  std::string category;
  std::string message;
};

std::string join(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += format_double(values[i]);
  }
  return s;
}

void write_fit(const fs::path& path, const SweepResult& sweep) {
  CsvTable t{{"slope", "intercept", "rms", "points", "asymptotic_onset"}, {}};
  if (sweep.fit) {
    t.rows.push_back({sweep.fit->slope, sweep.fit->intercept, sweep.fit->rms,
                      static_cast<double>(sweep.fit->points), sweep.asymptotic_onset});
  }
  write_csv(path, t);
}

int cmd_run(const std::string& config_path, const std::string& out_root, std::ostream& out) {
  const SimConfig cfg = read_config(config_path);
  const RecordedRun rec = run_to_directory(cfg, out_root);
  out << "run_dir=" << rec.directory.string() << '\n';
  out << "status=" << to_string(rec.result.status) << '\n';
  out << "t=" << format_double(rec.result.final_state.t) << '\n';
  if (rec.result.status == RunStatus::cfl_violation) {
    throw CflError(rec.result.message, rec.result.admissible_dt);
  }
  if (rec.result.status == RunStatus::non_finite) throw NumericalError(rec.result.message);
  return kSuccess;
}

int cmd_sweep_eps(const std::string& config_path, const std::vector<double>& eps, double s, double T,
                  const std::string& out_root, bool serial, std::ostream& out) {
  const SimConfig cfg = read_config(config_path);
  StudyDirectory study(out_root, cfg, "sweep-eps",
                       {{"eps", join(eps)}, {"s", format_double(s)}, {"T", format_double(T)}});
  SweepOptions options;
  options.run_root = study.runs_root();
  options.defect_etas = {0.25, 0.5};
  options.parallel = !serial;
  SweepResult sweep;
  try {
    sweep = vanishing_eps_sweep(cfg, eps, s, T, options);
  } catch (...) {
    study.finish("failed");
    throw;
  }
  write_csv(study.directory() / "sweep.csv", sweep.table());
  study.add_file("sweep.csv");
  write_fit(study.directory() / "fit.csv", sweep);
  study.add_file("fit.csv");
  study.finish("completed");
  out << "study_dir=" << study.directory().string() << '\n';
  if (sweep.fit) {
    out << "slope=" << format_double(sweep.fit->slope) << '\n';
    out << "intercept=" << format_double(sweep.fit->intercept) << '\n';
    out << "rms=" << format_double(sweep.fit->rms) << '\n';
  }
  return kSuccess;
}

int cmd_compare_alpha(const std::string& config_path, const std::vector<double>& alphas,
                      std::optional<double> eps_flag, const std::string& out_root, bool serial, std::ostream& out) {
  const SimConfig cfg = read_config(config_path);
  const double eps = eps_flag.value_or(cfg.eps);
  StudyDirectory study(out_root, cfg, "compare-alpha", {{"alpha", join(alphas)}, {"eps", format_double(eps)}});
  SweepOptions options;
  options.run_root = study.runs_root();
  options.parallel = !serial;
  const SweepResult sweep = alpha_comparison(cfg, alphas, eps, options);
  write_csv(study.directory() / "alpha.csv", sweep.table());
  study.add_file("alpha.csv");
  if (sweep.values.size() > 1) {
    write_csv(study.directory() / "spectra.csv", final_spectra_table(sweep));
    study.add_file("spectra.csv");
  }
  bool all_ok = true;
  for (const auto& r : sweep.runs) {
    if (!r.error.empty()) {
      all_ok = false;
      out << "alpha=" << format_double(r.parameter) << " failed: " << r.error << '\n';
    }
  }
  study.finish(all_ok ? "completed" : "partial");
  out << "study_dir=" << study.directory().string() << '\n';
  return all_ok ? kSuccess : kNumericalFailure;
}

Band parse_band(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("--band expects LO:HI");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ConfigError("--band expects LO:HI, got '" + text + "'");
  }
}

int cmd_classify(const std::vector<std::string>& specs, int n, int dim, double box, const std::string& band_text,
                 std::ostream& out) {
  const Lattice lattice = Lattice::build(n, dim, box);
  const Band band = band_text.empty() ? dealias_band(lattice) : parse_band(band_text);
  out << "spec,tag,alpha_hat,c0_hat,c1_hat,magnitude_slope,fit_residual,shells\n";
  for (const auto& spec : specs) {
    RawMultiplier raw = [&] {
      try {
        return parse_multiplier_spec(spec, lattice);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }();
    const SymbolClass c = classify(raw, lattice, band);
    out << spec << ',' << to_string(c.tag) << ',' << format_double(c.alpha_hat) << ',' << format_double(c.c0_hat)
        << ',' << format_double(c.c1_hat) << ',' << format_double(c.magnitude_slope) << ','
        << format_double(c.fit_residual) << ',' << c.shells << '\n';
  }
  return kSuccess;
}

int cmd_linear_spectra(double nu, double mu, const std::vector<double>& alphas, int kmax, std::optional<double> k0,
                       double tmax, int nt, const std::string& out_dir, std::ostream& out) {
  if (kmax < 1) throw ConfigError("--kmax must be at least 1");
  if (nt < 2) throw ConfigError("--nt must be at least 2");
  if (!(tmax > 0.0)) throw ConfigError("--tmax must be positive");
  std::vector<double> ks;
  for (int k = 1; k <= kmax; ++k) ks.push_back(k);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  const fs::path dir(out_dir);
  nlohmann::json manifest;
  manifest["kind"] = "linear-spectra";
  manifest["version"] = version();
  manifest["parameters"] = {{"nu", nu}, {"mu", mu}, {"alpha", alphas}, {"kmax", kmax}};

  write_csv(dir / "damping.csv", damping_table(nu, mu, alphas, ks));
  std::vector<std::string> files{"damping.csv"};
  out << "damping=" << (dir / "damping.csv").string() << '\n';
  if (k0) {
    std::vector<double> ts;
    for (int i = 0; i < nt; ++i) ts.push_back(tmax * i / (nt - 1));
    write_csv(dir / "decay.csv", decay_table(nu, mu, alphas, *k0, ts));
    files.push_back("decay.csv");
    manifest["parameters"]["k0"] = *k0;
    manifest["parameters"]["tmax"] = tmax;
    manifest["parameters"]["nt"] = nt;
    out << "decay=" << (dir / "decay.csv").string() << '\n';
  }
  manifest["files"] = files;
  manifest["finalized"] = true;
  std::ofstream m(dir / "manifest.json", std::ios::binary);
  m << manifest.dump(2) << '\n';
  if (!m) throw IoError("cannot write " + (dir / "manifest.json").string());
  return kSuccess;
}

int cmd_energy_audit(const std::string& rundir, double tol, std::ostream& out) {
  const AuditReport a = energy_audit(rundir, tol);
  out << "samples=" << a.samples << '\n';
  out << "max_interval_residual=" << format_double(a.max_interval) << '\n';
  out << "max_cumulative_residual=" << format_double(a.max_cumulative) << '\n';
  out << "tolerance=" << format_double(a.tolerance) << '\n';
  if (!a.passed()) {
    throw NumericalError("budget residual " + format_double(a.max_interval) + " exceeds tolerance " +
                         format_double(tol));
  }
  return kSuccess;
}

}  // namespace

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudospectral Navier-Stokes with nonlocal hyperdissipation", "hyperns"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  std::string config_path, out_root = "runs", rundir, band, out_dir = "linear-spectra";
  std::vector<double> eps_list, alpha_list;
  std::vector<std::string> specs;
  double s = 3.0, T = 0.5, nu = 1.0, mu = 1.0, tol = 1e-6, box = 2.0 * std::numbers::pi, tmax = 0.05;
  std::optional<double> eps_flag, k0;
  int n = 64, dim = 2, kmax = 64, nt = 101;
  bool serial = false;

  auto* run_cmd = app.add_subcommand("run", "Integrate one configuration into a run directory");
  run_cmd->add_option("config", config_path, "Config file")->required();
  run_cmd->add_option("--out", out_root, "Root for run directories");

  auto* sweep_cmd = app.add_subcommand("sweep-eps", "Vanishing-hyperdissipation sweep against eps = 0");
  sweep_cmd->add_option("config", config_path, "Base config file")->required();
  sweep_cmd->add_option("--eps", eps_list, "Decreasing eps values, comma separated")->required()->delimiter(',');
  sweep_cmd->add_option("--s", s, "Sobolev order s (errors are measured in H^{s-1})");
  sweep_cmd->add_option("--T", T, "Time horizon");
  sweep_cmd->add_option("--out", out_root, "Root for study directories");
  sweep_cmd->add_flag("--serial", serial, "Run members one after another");

  auto* alpha_cmd = app.add_subcommand("compare-alpha", "Identical data under several symbol orders");
  alpha_cmd->add_option("config", config_path, "Base config file")->required();
  alpha_cmd->add_option("--alpha", alpha_list, "Orders, comma separated")->required()->delimiter(',');
  alpha_cmd->add_option("--eps", eps_flag, "Hyperdissipation weight (default: config eps)");
  alpha_cmd->add_option("--out", out_root, "Root for study directories");
  alpha_cmd->add_flag("--serial", serial, "Run members one after another");

  auto* classify_cmd = app.add_subcommand("classify", "Classify multiplier symbols on a lattice");
  classify_cmd->add_option("--symbol", specs, "Symbol spec (repeatable)")->required();
  classify_cmd->add_option("--n", n, "Grid points per dimension");
  classify_cmd->add_option("--dim", dim, "Dimension (2 or 3)");
  classify_cmd->add_option("--L", box, "Box length");
  classify_cmd->add_option("--band", band, "Wavenumber band LO:HI (default: dealiased band)");

  auto* linear_cmd = app.add_subcommand("linear-spectra", "Linear damping and mode-decay tables");
  linear_cmd->add_option("--nu", nu, "Viscosity")->required();
  linear_cmd->add_option("--mu", mu, "Symbol amplitude")->required();
  linear_cmd->add_option("--alpha", alpha_list, "Orders, comma separated")->required()->delimiter(',');
  linear_cmd->add_option("--kmax", kmax, "Largest integer wavenumber")->required();
  linear_cmd->add_option("--k0", k0, "Mode for the decay table");
  linear_cmd->add_option("--tmax", tmax, "Decay table horizon");
  linear_cmd->add_option("--nt", nt, "Decay table samples");
  linear_cmd->add_option("--out", out_dir, "Output directory");

  auto* audit_cmd = app.add_subcommand("energy-audit", "Recompute the energy budget of a run directory");
  audit_cmd->add_option("rundir", rundir, "Run directory")->required();
  audit_cmd->add_option("--tol", tol, "Residual tolerance relative to E(0)");

  std::optional<Failure> failure;
  int code = kSuccess;
  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {
        out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? std::string(version()) + "\n" : app.help());
        return kSuccess;
      }
      throw Failure{kConfigError, "usage", e.what()};
    }

    if (*run_cmd) code = cmd_run(config_path, out_root, out);
    if (*sweep_cmd) code = cmd_sweep_eps(config_path, eps_list, s, T, out_root, serial, out);
    if (*alpha_cmd) code = cmd_compare_alpha(config_path, alpha_list, eps_flag, out_root, serial, out);
    if (*classify_cmd) code = cmd_classify(specs, n, dim, box, band, out);
    if (*linear_cmd) code = cmd_linear_spectra(nu, mu, alpha_list, kmax, k0, tmax, nt, out_dir, out);
    if (*audit_cmd) code = cmd_energy_audit(rundir, tol, out);
  } catch (const Failure& f) {
    failure = f;
  } catch (const ConfigError& e) {
    failure = Failure{kConfigError, "config", e.what()};
  } catch (const NumericalError& e) {
    failure = Failure{kNumericalFailure, "numerical", e.what()};
  } catch (const InvariantError& e) {
    failure = Failure{kIoError, "invariant", e.what()};
  } catch (const IoError& e) {
    failure = Failure{kIoError, "io", e.what()};
  } catch (const std::invalid_argument& e) {
    failure = Failure{kConfigError, "config", e.what()};
  } catch (const std::exception& e) {
    failure = Failure{kOther, "internal", e.what()};
  }
  if (failure) {
    std::string msg = failure->message;
    for (char& c : msg) {
      if (c == '\n' || c == '\r') c = ' ';
    }
    err << "error: " << failure->category << ": " << msg << '\n';
    return failure->code;
  }
  return code;
}

}  // namespace hyperns::cli
