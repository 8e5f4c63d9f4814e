#include "hyperns/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "hyperns/csv.hpp"
#include "hyperns/errors.hpp"

namespace hyperns {

namespace {

double norm2(const Wavevector& k) { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2]; }

Wavevector negate(const Wavevector& k) { return {-k[0], -k[1], -k[2]}; }

std::array<long long, 3> exact_key(const Wavevector& k) {
  return {std::llround(k[0] * 1e9), std::llround(k[1] * 1e9), std::llround(k[2] * 1e9)};
}

/// Least-squares line y = a + b x; returns {slope, intercept, rms}.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

void check_dissipative(const RealMultiplierFunction& raw_m, const MultiplierFunction& scale,
                       const Lattice& lattice, const std::string& what) {
  for (std::size_t f = 0; f < lattice.size(); ++f) {
    const Wavevector k = lattice.wavevector(f);
    const double m = raw_m(k);
    if (std::isnan(m)) throw std::invalid_argument(what + ": symbol is NaN on the lattice");
    const double tol = kSymbolSignTolerance * std::max(1.0, std::abs(scale(k)));
    if (m < -tol) {
      std::ostringstream os;
      os << what << ": dissipative part is negative (m = " << m << " at |k| = " << std::sqrt(norm2(k))
         << "); the term is not dissipative";
      throw std::invalid_argument(os.str());
    }
  }
}

/// Even, clamped dissipative part of a raw multiplier.
RealMultiplierFunction even_dissipative_part(MultiplierFunction ell) {
  return [ell = std::move(ell)](const Wavevector& k) {
    const double m = 0.5 * (-ell(k).real() + -ell(negate(k)).real());
    return m > 0.0 ? m : 0.0;
  };
}

}  // namespace

RawMultiplier::RawMultiplier(MultiplierFunction ell, std::string description)
    : ell_(std::move(ell)), description_(std::move(description)) {}

std::vector<double> MultiplierSymbol::tabulate(const Lattice& lattice) const {
  std::vector<double> m(lattice.size());
  for (std::size_t f = 0; f < lattice.size(); ++f) m[f] = f == 0 ? 0.0 : (*this)(lattice.wavevector(f));
  return m;
}

MultiplierSymbol power_symbol(double mu, double alpha) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("power_symbol: mu must be positive");
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("power_symbol: alpha must exceed 1 (use nu for Laplacian-order dissipation)");
  }
  auto m = [mu, alpha](const Wavevector& k) {
    const double k2 = norm2(k);
    return k2 == 0.0 ? 0.0 : mu * std::pow(k2, alpha);
  };
  std::ostringstream os;
  os << "power:" << format_double(mu) << ":" << format_double(alpha);
  RawMultiplier raw([m](const Wavevector& k) { return Complex(-m(k), 0.0); }, os.str());
  return MultiplierSymbol(std::move(raw), m, PowerLawSpec{mu, alpha});
}

MultiplierSymbol kernel_symbol(std::vector<MultiplierFunction> c_hat, const Lattice& lattice,
                               std::string description) {
  if (c_hat.empty() || c_hat.size() > 3) {
    throw std::invalid_argument("kernel_symbol: expected between 1 and 3 kernel transforms");
  }
  auto ell = [c = c_hat](const Wavevector& k) {
    Complex sum = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (k[j] != 0.0) sum += k[j] * k[j] * c[j](k);
    }
    return -sum;
  };
  auto scale = [c = c_hat](const Wavevector& k) {
    double sum = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (k[j] != 0.0) sum += k[j] * k[j] * std::abs(c[j](k));
    }
    return Complex(sum, 0.0);
  };
  check_dissipative([ell](const Wavevector& k) { return -ell(k).real(); }, scale, lattice, "kernel_symbol");
  RawMultiplier raw(ell, description);
  return MultiplierSymbol(std::move(raw), even_dissipative_part(ell), KernelSpec{std::move(description)});
}

RawMultiplier first_order_symbol(RealMultiplierFunction b_hat, int axis, const Lattice& lattice) {
  if (axis < 0 || axis >= lattice.dim()) throw std::invalid_argument("first_order_symbol: axis out of range");
  for (std::size_t f = 0; f < lattice.size(); ++f) {
    const Wavevector k = lattice.wavevector(f);
    const double a = b_hat(k);
    const double b = b_hat(negate(k));
    if (!(std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}))) {
      throw std::invalid_argument("first_order_symbol: b_hat is not even; the multiplier would not be purely imaginary");
    }
  }
  return RawMultiplier(
      [b = std::move(b_hat), axis](const Wavevector& k) { return Complex(0.0, k[axis] * b(k)); },
      "first-order:" + std::to_string(axis));
}

WavevectorTable::WavevectorTable(std::vector<Wavevector> keys, std::vector<std::vector<Complex>> values)
    : keys_(std::move(keys)), values_(std::move(values)) {
  if (keys_.empty() || keys_.size() != values_.size()) {
    throw std::invalid_argument("wavevector table: need a nonempty table with one value row per key");
  }
  width_ = values_.front().size();
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (values_[i].size() != width_) throw std::invalid_argument("wavevector table: ragged rows");
    exact_.emplace(exact_key(keys_[i]), i);
    by_radius_.emplace_back(std::sqrt(norm2(keys_[i])), i);
  }
  std::sort(by_radius_.begin(), by_radius_.end());
}

WavevectorTable WavevectorTable::read(const std::filesystem::path& path, const std::vector<std::string>& names) {
  const CsvTable csv = read_csv(path);
  try {
    const std::size_t c1 = csv.column("k1"), c2 = csv.column("k2"), c3 = csv.column("k3");
    std::vector<std::pair<std::size_t, std::size_t>> cols;
    for (const auto& name : names) cols.emplace_back(csv.column("re_" + name), csv.column("im_" + name));
    std::vector<Wavevector> keys;
    std::vector<std::vector<Complex>> values;
    for (const auto& row : csv.rows) {
      keys.push_back({row[c1], row[c2], row[c3]});
      std::vector<Complex> v;
      for (auto [re, im] : cols) v.emplace_back(row[re], row[im]);
      values.push_back(std::move(v));
    }
    return WavevectorTable(std::move(keys), std::move(values));
  } catch (const std::out_of_range& e) {
    throw IoError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

const std::vector<Complex>& WavevectorTable::lookup(const Wavevector& k) const {
  if (auto it = exact_.find(exact_key(k)); it != exact_.end()) return values_[it->second];
  const double r = std::sqrt(norm2(k));
  auto it = std::lower_bound(by_radius_.begin(), by_radius_.end(), std::make_pair(r, std::size_t{0}));
  if (it == by_radius_.end()) return values_[by_radius_.back().second];
  if (it != by_radius_.begin()) {
    auto prev = std::prev(it);
    if (r - prev->first <= it->first - r) return values_[prev->second];
  }
  return values_[it->second];
}

MultiplierSymbol tabulated_symbol(const WavevectorTable& table, const Lattice& lattice, std::string source) {
  if (table.width() != 1) throw std::invalid_argument("tabulated_symbol: expected one value column");
  auto ell = [table](const Wavevector& k) { return norm2(k) == 0.0 ? Complex(0.0) : table.lookup(k)[0]; };
  check_dissipative([ell](const Wavevector& k) { return -ell(k).real(); },
                    [ell](const Wavevector& k) { return Complex(std::abs(ell(k)), 0.0); }, lattice,
                    "tabulated_symbol");
  RawMultiplier raw(ell, "table:" + source);
  return MultiplierSymbol(std::move(raw), even_dissipative_part(ell), TabulatedSpec{std::move(source)});
}

MultiplierSymbol read_tabulated_symbol(const std::filesystem::path& path, const Lattice& lattice) {
  return tabulated_symbol(WavevectorTable::read(path, {"ell"}), lattice, path.string());
}

MultiplierSymbol read_kernel_symbol(const std::filesystem::path& path, const Lattice& lattice) {
  const WavevectorTable table = WavevectorTable::read(path, {"c1", "c2", "c3"});
  std::vector<MultiplierFunction> c;
  for (std::size_t j = 0; j < 3; ++j) {
    c.emplace_back([table, j](const Wavevector& k) { return table.lookup(k)[j]; });
  }
  return kernel_symbol(std::move(c), lattice, "kernel:" + path.string());
}

std::string to_string(SymbolTag tag) {
  switch (tag) {
    case SymbolTag::order_zero: return "order_zero";
    case SymbolTag::first_order_imaginary: return "first_order_imaginary";
    case SymbolTag::hyperdissipative: return "hyperdissipative";
    case SymbolTag::unclassified: return "unclassified";
  }
  return "unclassified";
}

Band dealias_band(const Lattice& lattice) {
  return {lattice.k_unit(), lattice.dealias_cutoff() * lattice.k_unit()};
}

SymbolClass classify(const RawMultiplier& ell, const Lattice& lattice, Band band) {
  if (!(band.k_min <= band.k_max) || !(band.k_max > 0.0)) throw std::invalid_argument("classify: empty band");

  struct Shell {
    double radius = 0.0;
    double max_abs = 0.0;
    double max_m = -std::numeric_limits<double>::infinity();
  };
  struct ModeValue {
    double k = 0.0;
    double m = 0.0;
  };
  std::map<int, Shell> shells;
  std::vector<ModeValue> modes;
  double max_abs_real = 0.0;
  double max_abs = 0.0;
  bool all_positive = true;

  const double lo = band.k_min * (1.0 - 1e-12);
  const double hi = band.k_max * (1.0 + 1e-12);
  for (std::size_t f = 1; f < lattice.size(); ++f) {
    if (!lattice.in_dealias_band(f)) continue;
    const double k = std::sqrt(lattice.k_squared(f));
    if (k < lo || k > hi) continue;
    const Complex l = ell(lattice.wavevector(f));
    if (std::isnan(l.real()) || std::isnan(l.imag())) throw std::invalid_argument("classify: symbol is NaN");
    Shell& s = shells[lattice.kappa_squared(f)];
    s.radius = k;
    s.max_abs = std::max(s.max_abs, std::abs(l));
    const double m = -l.real();
    s.max_m = std::max(s.max_m, m);
    all_positive = all_positive && m > 0.0;
    max_abs_real = std::max(max_abs_real, std::abs(l.real()));
    max_abs = std::max(max_abs, std::abs(l));
    modes.push_back({k, m});
  }
  if (shells.size() < 8) {
    throw std::invalid_argument("classify: band holds " + std::to_string(shells.size()) +
                                " shells inside the dealias band, need at least 8");
  }

  SymbolClass out;
  out.shells = static_cast<int>(shells.size());

  std::vector<double> x, y;
  for (const auto& [key, s] : shells) {
    if (s.max_abs > 0.0) {
      x.push_back(std::log(s.radius));
      y.push_back(std::log(s.max_abs));
    }
  }
  LineFit magnitude_fit;
  if (x.size() >= 2) magnitude_fit = fit_line(x, y);
  out.magnitude_slope = magnitude_fit.slope;

  if (max_abs_real <= 1e-12 * std::max(1.0, max_abs) &&
      std::abs(magnitude_fit.slope - 1.0) <= kSlopeTolerance && x.size() == shells.size()) {
    out.tag = SymbolTag::first_order_imaginary;
    out.fit_residual = magnitude_fit.rms;
    return out;
  }

  if (all_positive) {
    std::vector<double> lx, ly;
    for (const auto& [key, s] : shells) {
      lx.push_back(std::log(s.radius));
      ly.push_back(std::log(s.max_m));
    }
    const LineFit m_fit = fit_line(lx, ly);
    out.alpha_hat = 0.5 * m_fit.slope;
    out.fit_residual = m_fit.rms;
    if (out.alpha_hat > 1.0 + 0.5 * kSlopeTolerance) {
      out.tag = SymbolTag::hyperdissipative;
      double c0 = std::numeric_limits<double>::infinity();
      double c1 = 0.0;
      for (const auto& mv : modes) {
        const double p = std::pow(mv.k, 2.0 * out.alpha_hat);
        c0 = std::min(c0, mv.m / p);
        c1 = std::max(c1, mv.m / (1.0 + p));
      }
      out.c0_hat = c0;
      // Smallest upper constant compatible with c0 <= c1.
      out.c1_hat = std::max(c0, c1);
      return out;
    }
  }

  if (max_abs == 0.0 || magnitude_fit.slope < kSlopeTolerance) {
    out.tag = SymbolTag::order_zero;
    out.fit_residual = magnitude_fit.rms;
    return out;
  }
  out.tag = SymbolTag::unclassified;
  return out;
}

SpectralVelocity apply_multiplier(const MultiplierSymbol& symbol, const SpectralVelocity& u) {
  const Lattice& lat = u.lattice();
  const std::vector<double> m = symbol.tabulate(lat);
  SpectralVectorField out = u.field();
  for (int i = 0; i < out.components(); ++i) {
    auto c = out.component(i);
    for (std::size_t f = 0; f < lat.size(); ++f) c[f] *= m[f];
  }
  return SpectralVelocity::from_field(std::move(out), u.time());
}

double multiplier_energy(const MultiplierSymbol& symbol, const SpectralVelocity& u) {
  const Lattice& lat = u.lattice();
  const std::vector<double> m = symbol.tabulate(lat);
  double sum = 0.0;
  for (std::size_t f = 0; f < lat.size(); ++f) {
    double mag2 = 0.0;
    for (int i = 0; i < u.components(); ++i) mag2 += std::norm(u.component(i)[f]);
    sum += m[f] * mag2;
  }
  return sum * lat.volume();
}

namespace {

std::vector<std::string> split_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream is(spec);
  while (std::getline(is, part, ':')) parts.push_back(part);
  return parts;
}

double parse_number(const std::string& text, const std::string& spec) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw std::invalid_argument("symbol spec '" + spec + "': '" + text + "' is not a number");
  }
  return v;
}

}  // namespace

std::optional<MultiplierSymbol> parse_dissipative_spec(const std::string& spec, const Lattice& lattice) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
  const auto parts = split_spec(spec);
  auto want = [&](std::size_t count) {
    if (parts.size() != count) throw std::invalid_argument("symbol spec '" + spec + "': wrong number of fields");
  };
  auto isotropic = [&](MultiplierFunction c) { return kernel_symbol({c, c, c}, lattice, spec); };

  if (head == "power") {
    want(3);
    return power_symbol(parse_number(parts[1], spec), parse_number(parts[2], spec));
  }
  if (head == "riesz") {
    want(2);
    const double alpha = parse_number(parts[1], spec);
    return isotropic([alpha](const Wavevector& k) {
      const double k2 = norm2(k);
      return Complex(k2 == 0.0 ? 0.0 : std::pow(k2, alpha - 1.0), 0.0);
    });
  }
  if (head == "laplacian") {
    want(1);
    return isotropic([](const Wavevector&) { return Complex(1.0, 0.0); });
  }
  if (head == "kernel-const") {
    want(2);
    const double c = parse_number(parts[1], spec);
    return isotropic([c](const Wavevector&) { return Complex(c, 0.0); });
  }
  if (head == "kernel-gaussian") {
    want(2);
    const double w = parse_number(parts[1], spec);
    return isotropic([w](const Wavevector& k) { return Complex(std::exp(-norm2(k) * w * w), 0.0); });
  }
  if (head == "kernel") {
    if (rest.empty()) throw std::invalid_argument("symbol spec '" + spec + "': missing path");
    return read_kernel_symbol(rest, lattice);
  }
  if (head == "table") {
    if (rest.empty()) throw std::invalid_argument("symbol spec '" + spec + "': missing path");
    return read_tabulated_symbol(rest, lattice);
  }
  return std::nullopt;
}

RawMultiplier parse_multiplier_spec(const std::string& spec, const Lattice& lattice) {
  if (auto sym = parse_dissipative_spec(spec, lattice)) return sym->multiplier();

  const std::string head = spec.substr(0, spec.find(':'));
  const auto parts = split_spec(spec);
  auto want = [&](std::size_t count) {
    if (parts.size() != count) throw std::invalid_argument("symbol spec '" + spec + "': wrong number of fields");
  };
  if (head == "gaussian") {
    want(2);
    const double sigma = parse_number(parts[1], spec);
    return RawMultiplier(
        [sigma](const Wavevector& k) { return Complex(std::exp(-0.5 * sigma * sigma * norm2(k)), 0.0); }, spec);
  }
  if (head == "first-order") {
    want(2);
    const int axis = static_cast<int>(parse_number(parts[1], spec));
    return first_order_symbol([](const Wavevector&) { return 1.0; }, axis, lattice);
  }
  if (head == "first-order-gaussian") {
    want(3);
    const int axis = static_cast<int>(parse_number(parts[1], spec));
    const double sigma = parse_number(parts[2], spec);
    return first_order_symbol(
        [sigma](const Wavevector& k) { return std::exp(-0.5 * sigma * sigma * norm2(k)); }, axis, lattice);
  }
  throw std::invalid_argument("symbol spec '" + spec + "': unknown kind '" + head + "'");
}

}  // namespace hyperns
