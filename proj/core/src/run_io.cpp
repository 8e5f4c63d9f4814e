#include "hyperns/run_io.hpp"

#include <ctime>
#include <nlohmann/json.hpp>

#include "hyperns/csv.hpp"
#include "hyperns/errors.hpp"
#include "hyperns/snapshot.hpp"

namespace hyperns {

namespace {

namespace fs = std::filesystem;

std::string iso_time(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << format_double(v);
    first = false;
  }
  out << '\n';
}

// Write-then-rename so readers never see a half-written manifest.
void write_json_atomically(const fs::path& dir, const nlohmann::json& m) {
  const fs::path tmp = dir / "manifest.json.tmp";
  {
    auto out = open_out(tmp);
    out << m.dump(2) << '\n';
    if (!out) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, dir / "manifest.json", ec);
  if (ec) throw IoError("cannot finalize manifest in " + dir.string() + ": " + ec.message());
}

nlohmann::json config_echo(const SimConfig& cfg) {
  nlohmann::json j;
  j["nu"] = cfg.nu;
  j["eps"] = cfg.eps;
  j["symbol"] = symbol_spec_text(cfg.symbol);
  j["mu"] = cfg.symbol.mu;
  if (!std::isnan(cfg.symbol.alpha)) j["alpha"] = cfg.symbol.alpha;
  j["n"] = cfg.n;
  j["dim"] = cfg.dim;
  j["box_length"] = cfg.box_length;
  j["dt"] = cfg.dt;
  j["t_end"] = cfg.t_end;
  j["output_every"] = cfg.output_every;
  j["ic"] = cfg.ic.kind == InitialConditionSpec::Kind::random     ? std::string("random")
            : cfg.ic.kind == InitialConditionSpec::Kind::snapshot ? "snapshot:" + cfg.ic.name
                                                                  : cfg.ic.name;
  j["seed"] = cfg.random.seed;
  j["sigma"] = cfg.random.sigma;
  j["k_c"] = cfg.random.k_c;
  j["amplitude"] = cfg.random.amplitude;
  j["s"] = cfg.s;
  j["eta"] = cfg.eta;
  j["nonlinear"] = cfg.nonlinear;
  return j;
}

}  // namespace

RunWriter::RunWriter(const fs::path& root, const SimConfig& cfg)
    : cfg_(cfg), hash_(config_hash(cfg)), dir_(root / hash_), start_(std::chrono::system_clock::now()) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create run directory " + dir_.string() + ": " + ec.message());

  {
    auto out = open_out(dir_ / "config.txt");
    out << canonical_config_text(cfg_);
    if (!out) throw IoError("cannot write " + (dir_ / "config.txt").string());
  }
  diagnostics_ = open_out(dir_ / "diagnostics.csv");
  diagnostics_ << "t,energy,enstrophy,visc_rate,hyper_rate,budget_residual\n";
  spectrum_ = open_out(dir_ / "spectrum.csv");
  spectrum_ << "t,shell,energy\n";
  files_ = {"config.txt", "diagnostics.csv", "spectrum.csv"};
  write_manifest(false, nullptr);
}

DiagnosticSink RunWriter::sink() {
  return [this](const TrajectoryState&, const DiagnosticsRecord& rec) {
    write_row(diagnostics_, {rec.t, rec.energy, rec.enstrophy, rec.visc_dissipation_rate,
                             rec.hyper_dissipation_rate, rec.budget_residual});
    for (const auto& s : rec.shell_spectrum) write_row(spectrum_, {rec.t, static_cast<double>(s.shell), s.energy});
    diagnostics_.flush();
    spectrum_.flush();
    if (!diagnostics_ || !spectrum_) throw IoError("write failed in " + dir_.string());
  };
}

void RunWriter::finish(const RunResult& result) {
  diagnostics_.close();
  spectrum_.close();

  CsvTable budget{{"t", "energy", "visc_rate", "hyper_rate"}, {}};
  for (const auto& b : result.budget) budget.rows.push_back({b.t, b.energy, b.visc_rate, b.hyper_rate});
  write_csv(dir_ / "budget.csv", budget);
  files_.push_back("budget.csv");

  if (!result.defects.empty()) {
    CsvTable defect{{"eta", "crossover", "low", "high", "bound_rhs", "bound_constant", "bound_certified", "t_end"},
                    {}};
    for (const auto& d : result.defects) {
      defect.rows.push_back({d.eta, d.crossover, d.low, d.high, d.bound_rhs, d.bound_constant,
                             d.bound_certified ? 1.0 : 0.0, d.t_end});
    }
    write_csv(dir_ / "defect.csv", defect);
    files_.push_back("defect.csv");
  }

  write_snapshot(dir_ / "final.hypf", result.final_state.u, cfg_);
  files_.push_back("final.hypf");
  write_manifest(true, &result);
}

void RunWriter::write_manifest(bool finalized, const RunResult* result) {
  nlohmann::json m;
  m["config"] = config_echo(cfg_);
  m["version"] = HYPERNS_VERSION;
  m["seed"] = cfg_.random.seed;
  m["hash"] = hash_;
  m["start"] = iso_time(start_);
  m["end"] = finalized ? nlohmann::json(iso_time(std::chrono::system_clock::now())) : nlohmann::json(nullptr);
  m["files"] = files_;
  m["finalized"] = finalized;
  if (result) {
    m["status"] = to_string(result->status);
    if (!result->message.empty()) m["message"] = result->message;
    if (result->status == RunStatus::cfl_violation) m["admissible_dt"] = result->admissible_dt;
    m["t_final"] = result->final_state.t;
    m["steps"] = result->final_state.step_index;
  }
  write_json_atomically(dir_, m);
}

StudyDirectory::StudyDirectory(const fs::path& root, const SimConfig& base, const std::string& kind,
                               const std::vector<std::pair<std::string, std::string>>& parameters)
    : base_(base), kind_(kind), parameters_(parameters), start_(std::chrono::system_clock::now()) {
  std::string text = "kind = " + kind + "\n" + canonical_config_text(base);
  for (const auto& [key, value] : parameters) text += key + " = " + value + "\n";
  hash_ = content_hash(text);
  dir_ = root / hash_;
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create study directory " + dir_.string() + ": " + ec.message());
  auto out = open_out(dir_ / "config.txt");
  out << canonical_config_text(base);
  files_.push_back("config.txt");
  write_manifest(false, "running");
}

void StudyDirectory::finish(const std::string& status) { write_manifest(true, status); }

void StudyDirectory::write_manifest(bool finalized, const std::string& status) {
  nlohmann::json m;
  m["kind"] = kind_;
  m["config"] = config_echo(base_);
  for (const auto& [key, value] : parameters_) m["parameters"][key] = value;
  m["version"] = HYPERNS_VERSION;
  m["seed"] = base_.random.seed;
  m["hash"] = hash_;
  m["start"] = iso_time(start_);
  m["end"] = finalized ? nlohmann::json(iso_time(std::chrono::system_clock::now())) : nlohmann::json(nullptr);
  m["files"] = files_;
  m["finalized"] = finalized;
  m["status"] = status;
  write_json_atomically(dir_, m);
}

RecordedRun run_to_directory(const SimConfig& cfg, const fs::path& root, const RunOptions& options) {
  cfg.validate();
  RunWriter writer(root, cfg);
  const DiagnosticSink sinks[] = {writer.sink()};
  RunResult result = run(cfg, sinks, options);
  writer.finish(result);
  return {std::move(result), writer.directory()};
}

AuditReport energy_audit(const fs::path& rundir, double tolerance) {
  const CsvTable table = read_csv(rundir / "budget.csv");
  const std::size_t ct = table.column("t"), ce = table.column("energy"), cv = table.column("visc_rate"),
                    ch = table.column("hyper_rate");
  std::vector<BudgetSample> samples;
  samples.reserve(table.rows.size());
  for (const auto& r : table.rows) samples.push_back({r[ct], r[ce], r[cv], r[ch]});
  if (samples.empty()) throw IoError(rundir.string() + "/budget.csv has no samples");
  BudgetReport report;
  try {
    report = energy_budget(samples);
  } catch (const std::invalid_argument& e) {
    throw IoError(rundir.string() + "/budget.csv: " + e.what());
  }
  AuditReport audit;
  audit.samples = samples.size();
  audit.max_interval = report.max_interval;
  audit.max_cumulative = report.max_cumulative;
  audit.tolerance = tolerance;
  return audit;
}

}  // namespace hyperns
