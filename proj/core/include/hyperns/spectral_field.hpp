#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperns/lattice.hpp"
#include "hyperns/transform.hpp"

namespace hyperns {

/// Vector field of Fourier coefficients, one array per velocity component.
/// No invariants beyond shape.
class SpectralVectorField {
 public:
  explicit SpectralVectorField(const Lattice& lattice);

  const Lattice& lattice() const { return lattice_; }
  int components() const { return static_cast<int>(comps_.size()); }
  std::span<Complex> component(int i) { return comps_.at(static_cast<std::size_t>(i)); }
  std::span<const Complex> component(int i) const { return comps_.at(static_cast<std::size_t>(i)); }

  bool operator==(const SpectralVectorField& other) const {
    return lattice_ == other.lattice_ && comps_ == other.comps_;
  }

 private:
  Lattice lattice_;
  std::vector<std::vector<Complex>> comps_;
};

/// Relative divergence tolerance for a spectral velocity.
inline constexpr double kDivergenceTolerance = 1e-12;

/// A real, zero-mean, divergence-free velocity in Fourier form.
///
/// Invariants, enforced at construction:
///  - c(-kappa) == conj(c(kappa)) exactly,
///  - c(0) == 0 and every Nyquist-row coefficient is zero,
///  - |k.c(k)| <= kDivergenceTolerance |k| |c(k)| for every mode.
class SpectralVelocity {
 public:
  static SpectralVelocity zero(const Lattice& lattice, double time = 0.0);

  /// Validates the invariants and throws InvariantError naming the first
  /// violation.
  static SpectralVelocity from_field(SpectralVectorField field, double time = 0.0);

  const Lattice& lattice() const { return field_.lattice(); }
  const SpectralVectorField& field() const { return field_; }
  std::span<const Complex> component(int i) const { return field_.component(i); }
  int components() const { return field_.components(); }
  double time() const { return time_; }
  SpectralVelocity with_time(double t) const {
    SpectralVelocity copy = *this;
    copy.time_ = t;
    return copy;
  }

  bool operator==(const SpectralVelocity& other) const = default;

 private:
  SpectralVelocity(SpectralVectorField field, double time) : field_(std::move(field)), time_(time) {}
  friend SpectralVelocity leray_project(SpectralVectorField v, double time);
  friend SpectralVelocity dealias(const SpectralVelocity& u);

  SpectralVectorField field_;
  double time_ = 0.0;
};

/// Returns a description of the first violated SpectralVelocity invariant.
std::optional<std::string> find_invariant_violation(const SpectralVectorField& field,
                                                    double divergence_tolerance = kDivergenceTolerance);

/// Leray projection P(k) = I - k k^T / |k|^2, followed by zeroing the mean
/// and Nyquist rows and restoring exact Hermitian symmetry.
SpectralVelocity leray_project(SpectralVectorField v, double time = 0.0);

/// The projection of leray_project() applied in place, without building a
/// SpectralVelocity.
void leray_project_in_place(SpectralVectorField& v);

/// Zeroes every mode with some |kappa_i| > floor(n/3).
SpectralVectorField dealias(SpectralVectorField v);
SpectralVelocity dealias(const SpectralVelocity& u);

/// max over k != 0 of |k.c(k)| / (|k| |c(k)|), skipping zero coefficients.
double max_relative_divergence(const SpectralVectorField& field);

struct SobolevIndex {
  enum class Variant { homogeneous, inhomogeneous };
  double s = 0.0;
  Variant variant = Variant::homogeneous;
};

/// Homogeneous: (L^dim sum |k|^{2s} |c(k)|^2)^{1/2}, skipping k = 0.
/// Inhomogeneous: the same with weight (1 + |k|^2)^s.
double sobolev_norm(const SpectralVectorField& field, SobolevIndex index);
double sobolev_norm(const SpectralVelocity& u, SobolevIndex index);

/// ||u||_{L^2} via Parseval: L^dim sum |c|^2.
double l2_norm(const SpectralVectorField& field);
/// Real L^2 inner product <a, b> = L^dim sum Re(conj(a) b).
double inner_product(const SpectralVectorField& a, const SpectralVectorField& b);

/// Physical-space samples of each velocity component.
std::vector<std::vector<double>> to_physical(const SpectralVectorField& field);
/// Forward-transforms each component (no projection).
SpectralVectorField from_physical(const Lattice& lattice, std::span<const std::vector<double>> components);

}  // namespace hyperns
