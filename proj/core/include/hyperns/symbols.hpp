#pragma once

#include <complex>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hyperns/lattice.hpp"
#include "hyperns/spectral_field.hpp"

namespace hyperns {

using MultiplierFunction = std::function<Complex(const Wavevector&)>;
using RealMultiplierFunction = std::function<double(const Wavevector&)>;

/// Raw Fourier multiplier l(k) of an extra linear term L: (Lu)^(k) = l(k) u^(k).
class RawMultiplier {
 public:
  RawMultiplier(MultiplierFunction ell, std::string description);

  Complex operator()(const Wavevector& k) const { return ell_(k); }
  const std::string& description() const { return description_; }

 private:
  MultiplierFunction ell_;
  std::string description_;
};

/// Complex values keyed by wavevector, loaded from CSV. Lookups match a row
/// exactly when one exists and otherwise take the row whose |k| is nearest.
class WavevectorTable {
 public:
  WavevectorTable(std::vector<Wavevector> keys, std::vector<std::vector<Complex>> values);

  /// columns: k1,k2,k3 followed by (re_<name>, im_<name>) per value name.
  static WavevectorTable read(const std::filesystem::path& path, const std::vector<std::string>& value_names);

  std::size_t rows() const { return keys_.size(); }
  std::size_t width() const { return width_; }
  const std::vector<Complex>& lookup(const Wavevector& k) const;

 private:
  std::vector<Wavevector> keys_;
  std::vector<std::vector<Complex>> values_;
  std::size_t width_ = 0;
  std::map<std::array<long long, 3>, std::size_t> exact_;
  std::vector<std::pair<double, std::size_t>> by_radius_;
};

struct PowerLawSpec {
  double mu = 1.0;
  double alpha = 1.25;
};
struct KernelSpec {
  std::string description;
};
struct TabulatedSpec {
  std::string source;
};
using SymbolProvenance = std::variant<PowerLawSpec, KernelSpec, TabulatedSpec>;

/// Tolerance below zero accepted (and clamped) for the dissipative part.
inline constexpr double kSymbolSignTolerance = 1e-12;

/// Nonnegative even dissipation symbol m(k) = Re(-l(k)) together with the
/// raw multiplier it came from. Immutable; safe to share between threads.
class MultiplierSymbol {
 public:
  /// m(k); always >= 0 and m(-k) == m(k).
  double operator()(const Wavevector& k) const { return dissipative_(k); }
  Complex raw(const Wavevector& k) const { return raw_(k); }
  const RawMultiplier& multiplier() const { return raw_; }
  const SymbolProvenance& provenance() const { return provenance_; }
  /// Non-null for power_symbol() results.
  const PowerLawSpec* power_law() const { return std::get_if<PowerLawSpec>(&provenance_); }
  const std::string& description() const { return raw_.description(); }

  /// m evaluated at every lattice mode (storage order).
  std::vector<double> tabulate(const Lattice& lattice) const;

 private:
  MultiplierSymbol(RawMultiplier raw, RealMultiplierFunction dissipative, SymbolProvenance provenance)
      : raw_(std::move(raw)), dissipative_(std::move(dissipative)), provenance_(std::move(provenance)) {}

  friend MultiplierSymbol power_symbol(double, double);
  friend MultiplierSymbol kernel_symbol(std::vector<MultiplierFunction>, const Lattice&, std::string);
  friend MultiplierSymbol tabulated_symbol(const WavevectorTable&, const Lattice&, std::string);

  RawMultiplier raw_;
  RealMultiplierFunction dissipative_;
  SymbolProvenance provenance_;
};

/// m(k) = mu |k|^{2 alpha}. Throws std::invalid_argument unless mu > 0 and
/// alpha > 1 (plain viscosity belongs in nu).
MultiplierSymbol power_symbol(double mu, double alpha);

/// Convolution of second derivatives: l(k) = -sum_j k_j^2 c_j(k), hence
/// m(k) = sum_j k_j^2 Re c_j(k). c_hat holds one transform per axis (missing
/// trailing axes are zero). Throws std::invalid_argument if m < -1e-12
/// anywhere on the lattice: such a kernel is not dissipative.
MultiplierSymbol kernel_symbol(std::vector<MultiplierFunction> c_hat, const Lattice& lattice,
                               std::string description);

/// l(k) = i k_axis b(k) for a real transform b. The multiplier is purely
/// imaginary when b is even; an odd part is rejected (std::invalid_argument).
RawMultiplier first_order_symbol(RealMultiplierFunction b_hat, int axis, const Lattice& lattice);

/// Symbol from a measured or precomputed table of l(k) (one value column).
MultiplierSymbol tabulated_symbol(const WavevectorTable& table, const Lattice& lattice, std::string source);
/// Reads CSV columns k1,k2,k3,re_ell,im_ell.
MultiplierSymbol read_tabulated_symbol(const std::filesystem::path& path, const Lattice& lattice);
/// Reads CSV columns k1,k2,k3,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3 and builds
/// the kernel symbol of those transforms.
MultiplierSymbol read_kernel_symbol(const std::filesystem::path& path, const Lattice& lattice);

enum class SymbolTag { order_zero, first_order_imaginary, hyperdissipative, unclassified };
std::string to_string(SymbolTag tag);

struct SymbolClass {
  SymbolTag tag = SymbolTag::unclassified;
  /// Half the fitted log-log slope of shell-max m; meaningful for
  /// hyperdissipative symbols and reported for the others as a diagnostic.
  double alpha_hat = 0.0;
  double c0_hat = 0.0;
  double c1_hat = 0.0;
  /// RMS residual of the regression that decided the tag.
  double fit_residual = 0.0;
  /// Log-log slope of shell-max |l| against |k|.
  double magnitude_slope = 0.0;
  int shells = 0;
};

/// Physical wavenumber band [k_min, k_max] used by classify().
struct Band {
  double k_min = 0.0;
  double k_max = 0.0;
};

/// Slope threshold separating orders 0, 1 and >= 2.
inline constexpr double kSlopeTolerance = 0.1;

/// Sorts a multiplier into the trichotomy bounded / first-order imaginary /
/// hyperdissipative by log-log regression over the integer shells of the
/// band (restricted to the dealiased modes). Throws std::invalid_argument
/// for bands with fewer than 8 shells and for NaN values.
SymbolClass classify(const RawMultiplier& ell, const Lattice& lattice, Band band);

/// The widest band classify() accepts on this lattice: [k_unit, floor(n/3) k_unit].
Band dealias_band(const Lattice& lattice);

/// (Mu)^ = m u^ componentwise.
SpectralVelocity apply_multiplier(const MultiplierSymbol& symbol, const SpectralVelocity& u);

/// <Mu, u> = L^dim sum m |u^|^2.
double multiplier_energy(const MultiplierSymbol& symbol, const SpectralVelocity& u);

/// Parses multiplier specs used on the command line:
///   power:MU:ALPHA, riesz:ALPHA, laplacian, kernel-const:C,
///   kernel-gaussian:WIDTH, kernel:PATH, table:PATH (dissipative symbols),
///   gaussian:SIGMA (an L^1 convolution), first-order:AXIS and
///   first-order-gaussian:AXIS:SIGMA (raw multipliers only).
/// kernel-* kinds use the same transform on every axis. Throws
/// std::invalid_argument on malformed text or a non-dissipative kernel.
RawMultiplier parse_multiplier_spec(const std::string& spec, const Lattice& lattice);

/// The dissipative kinds of parse_multiplier_spec as full symbols; nullopt
/// for the raw-only kinds.
std::optional<MultiplierSymbol> parse_dissipative_spec(const std::string& spec, const Lattice& lattice);

}  // namespace hyperns
