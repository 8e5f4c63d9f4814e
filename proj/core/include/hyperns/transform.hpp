#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "hyperns/lattice.hpp"

namespace hyperns {

using Complex = std::complex<double>;

/// Real <-> spectral transforms on one lattice.
///
/// Normalization: forward computes u_hat(kappa) = n^-dim sum_x u(x) e^{-i k.x},
/// so cos(x_1) has coefficient 1/2 at kappa = (+-1, 0). Inverse is the plain
/// Fourier sum. Grid point j along an axis sits at x = j L / n.
///
/// An instance owns its plan and scratch buffer and is not safe for
/// concurrent use; distinct instances are.
class FourierTransform {
 public:
  explicit FourierTransform(const Lattice& lattice);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;
  FourierTransform(FourierTransform&&) noexcept;
  FourierTransform& operator=(FourierTransform&&) noexcept;

  const Lattice& lattice() const;

  /// Output is made exactly Hermitian. Throws std::invalid_argument on a
  /// shape mismatch.
  void forward(std::span<const double> physical, std::span<Complex> spectral);
  std::vector<Complex> forward(std::span<const double> physical);

  /// Imaginary residue above 1e-12 of the field's peak magnitude means the
  /// input was not Hermitian; that raises InvariantError.
  void inverse(std::span<const Complex> spectral, std::span<double> physical);
  std::vector<double> inverse(std::span<const Complex> spectral);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Relative tolerance on the imaginary residue of an inverse transform.
inline constexpr double kImaginaryResidueTolerance = 1e-12;

/// Symmetrize so that c(-kappa) == conj(c(kappa)) bit for bit; self-conjugate
/// modes get their imaginary part dropped.
void enforce_hermitian(const Lattice& lattice, std::span<Complex> coefficients);

/// max |c(-kappa) - conj(c(kappa))|; zero for an exactly Hermitian array.
double hermitian_defect(const Lattice& lattice, std::span<const Complex> coefficients);

}  // namespace hyperns

namespace hyperns {

/// One-shot forms of FourierTransform::forward / inverse.
std::vector<Complex> forward_transform(const Lattice& lattice, std::span<const double> physical);
std::vector<double> inverse_transform(const Lattice& lattice, std::span<const Complex> spectral);

}  // namespace hyperns
