#include "hyperns/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "hyperns/csv.hpp"
#include "hyperns/errors.hpp"

namespace hyperns {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

[[noreturn]] void fail_at(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double to_real(const std::string& key, const Entry& e) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != e.value.size()) fail_at(e.line, "key '" + key + "' expects a real number, got '" + e.value + "'");
  return v;
}

long long to_integer(const std::string& key, const Entry& e) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(e.value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != e.value.size()) fail_at(e.line, "key '" + key + "' expects an integer, got '" + e.value + "'");
  return v;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{"nu", "eps", "alpha", "mu", "symbol", "n", "dim", "box_length",
                                          "dt", "t_end", "output_every", "ic", "seed", "sigma", "k_c",
                                          "amplitude", "s", "eta", "nonlinear"};
  return keys;
}

}  // namespace

SimConfig parse_config(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail_at(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key)) fail_at(lineno, "unknown key '" + key + "'");
    if (value.empty()) fail_at(lineno, "key '" + key + "' has no value");
    if (auto it = entries.find(key); it != entries.end()) {
      fail_at(lineno, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second.line) + ")");
    }
    entries.emplace(key, Entry{value, lineno});
  }

  for (const char* required : {"nu", "eps", "symbol", "n", "dim", "dt", "t_end", "ic"}) {
    if (!entries.count(required)) throw ConfigError(std::string("missing required key '") + required + "'");
  }

  SimConfig cfg;
  auto real = [&](const char* key, double& dst) {
    if (auto it = entries.find(key); it != entries.end()) dst = to_real(key, it->second);
  };
  auto integer = [&](const char* key, auto& dst) {
    if (auto it = entries.find(key); it != entries.end()) {
      const long long v = to_integer(key, it->second);
      using T = std::remove_reference_t<decltype(dst)>;
      if (v < 0 && std::is_unsigned_v<T>) fail_at(it->second.line, std::string("key '") + key + "' must be nonnegative");
      dst = static_cast<T>(v);
    }
  };

  real("nu", cfg.nu);
  real("eps", cfg.eps);
  real("mu", cfg.symbol.mu);
  real("alpha", cfg.symbol.alpha);
  integer("n", cfg.n);
  integer("dim", cfg.dim);
  real("box_length", cfg.box_length);
  real("dt", cfg.dt);
  real("t_end", cfg.t_end);
  integer("output_every", cfg.output_every);
  integer("seed", cfg.random.seed);
  real("sigma", cfg.random.sigma);
  real("k_c", cfg.random.k_c);
  real("amplitude", cfg.random.amplitude);
  real("s", cfg.s);
  real("eta", cfg.eta);

  if (auto it = entries.find("nonlinear"); it != entries.end()) {
    if (it->second.value == "true") {
      cfg.nonlinear = true;
    } else if (it->second.value == "false") {
      cfg.nonlinear = false;
    } else {
      fail_at(it->second.line, "key 'nonlinear' expects true or false");
    }
  }

  const Entry& sym = entries.at("symbol");
  if (sym.value == "power") {
    cfg.symbol.kind = SymbolChoice::Kind::power;
    if (!entries.count("alpha")) fail_at(sym.line, "symbol=power requires key 'alpha'");
  } else if (sym.value.rfind("kernel:", 0) == 0) {
    cfg.symbol.kind = SymbolChoice::Kind::kernel;
    cfg.symbol.path = sym.value.substr(7);
  } else if (sym.value.rfind("table:", 0) == 0) {
    cfg.symbol.kind = SymbolChoice::Kind::table;
    cfg.symbol.path = sym.value.substr(6);
  } else {
    fail_at(sym.line, "symbol must be power, kernel:PATH or table:PATH");
  }
  if (cfg.symbol.kind != SymbolChoice::Kind::power && cfg.symbol.path.empty()) {
    fail_at(sym.line, "symbol needs a path");
  }

  const Entry& ic = entries.at("ic");
  if (ic.value == "random") {
    cfg.ic = {InitialConditionSpec::Kind::random, ""};
  } else if (ic.value.rfind("snapshot:", 0) == 0) {
    cfg.ic = {InitialConditionSpec::Kind::snapshot, ic.value.substr(9)};
    if (cfg.ic.name.empty()) fail_at(ic.line, "ic=snapshot: needs a path");
  } else if (ic.value == "taylor-green-2d" || ic.value == "taylor-green-3d") {
    cfg.ic = {InitialConditionSpec::Kind::preset, ic.value};
  } else {
    fail_at(ic.line, "ic must be taylor-green-2d, taylor-green-3d, random or snapshot:PATH");
  }

  if (cfg.symbol.kind == SymbolChoice::Kind::power && !(cfg.symbol.alpha > 1.0)) {
    fail_at(entries.at("alpha").line,
            "alpha must exceed 1 for symbol=power: a hyperdissipative symbol has order 2*alpha > 2");
  }
  if (!(cfg.eps >= 0.0)) fail_at(entries.at("eps").line, "eps must be nonnegative");

  cfg.validate();
  return cfg;
}

SimConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::string symbol_spec_text(const SymbolChoice& symbol) {
  switch (symbol.kind) {
    case SymbolChoice::Kind::power:
      return "power:" + format_double(symbol.mu) + ":" + format_double(symbol.alpha);
    case SymbolChoice::Kind::kernel: return "kernel:" + symbol.path;
    case SymbolChoice::Kind::table: return "table:" + symbol.path;
  }
  return "";
}

std::string canonical_config_text(const SimConfig& cfg) {
  std::ostringstream os;
  auto put = [&](const char* key, const std::string& value) { os << key << " = " << value << '\n'; };
  put("nu", format_double(cfg.nu));
  put("eps", format_double(cfg.eps));
  switch (cfg.symbol.kind) {
    case SymbolChoice::Kind::power: put("symbol", "power"); break;
    case SymbolChoice::Kind::kernel: put("symbol", "kernel:" + cfg.symbol.path); break;
    case SymbolChoice::Kind::table: put("symbol", "table:" + cfg.symbol.path); break;
  }
  if (!std::isnan(cfg.symbol.alpha)) put("alpha", format_double(cfg.symbol.alpha));
  put("mu", format_double(cfg.symbol.mu));
  put("n", std::to_string(cfg.n));
  put("dim", std::to_string(cfg.dim));
  put("box_length", format_double(cfg.box_length));
  put("dt", format_double(cfg.dt));
  put("t_end", format_double(cfg.t_end));
  put("output_every", std::to_string(cfg.output_every));
  switch (cfg.ic.kind) {
    case InitialConditionSpec::Kind::random: put("ic", "random"); break;
    case InitialConditionSpec::Kind::preset: put("ic", cfg.ic.name); break;
    case InitialConditionSpec::Kind::snapshot: put("ic", "snapshot:" + cfg.ic.name); break;
  }
  put("seed", std::to_string(cfg.random.seed));
  put("sigma", format_double(cfg.random.sigma));
  put("k_c", format_double(cfg.random.k_c));
  put("amplitude", format_double(cfg.random.amplitude));
  put("s", format_double(cfg.s));
  put("eta", format_double(cfg.eta));
  put("nonlinear", cfg.nonlinear ? "true" : "false");
  return os.str();
}

std::string config_hash(const SimConfig& cfg) { return content_hash(canonical_config_text(cfg)); }

std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const char* version() { return HYPERNS_VERSION; }

bool operator==(const SimConfig& a, const SimConfig& b) {
  auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  return a.nu == b.nu && a.eps == b.eps && a.symbol.kind == b.symbol.kind && a.symbol.path == b.symbol.path &&
         a.symbol.mu == b.symbol.mu && same(a.symbol.alpha, b.symbol.alpha) && a.n == b.n && a.dim == b.dim &&
         a.box_length == b.box_length && a.dt == b.dt && a.t_end == b.t_end && a.output_every == b.output_every &&
         a.ic.kind == b.ic.kind && a.ic.name == b.ic.name && a.random.seed == b.random.seed &&
         a.random.sigma == b.random.sigma && a.random.k_c == b.random.k_c &&
         a.random.amplitude == b.random.amplitude && a.s == b.s && a.eta == b.eta && a.nonlinear == b.nonlinear;
}

}  // namespace hyperns
