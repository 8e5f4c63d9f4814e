#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace hyperns {

/// Integer wavenumber vector. Unused components (dim = 2) are zero.
using ModeIndex = std::array<int, 3>;
/// Physical wavenumber k = k_unit * kappa.
using Wavevector = std::array<double, 3>;

/// Discrete frequency grid of the periodic box [0, L)^dim with n points per
/// dimension. Storage is row-major with the last axis fastest; along each
/// axis storage index i holds kappa = i for i < n/2 and kappa = i - n
/// otherwise (the usual FFT ordering).
class Lattice {
 public:
  /// Throws std::invalid_argument for odd n, n < 4, dim not in {2,3} or a
  /// non-positive box length.
  static Lattice build(int n_per_dim, int dim, double box_length);

  int n() const { return n_; }
  int dim() const { return dim_; }
  double box_length() const { return box_length_; }
  double k_unit() const { return k_unit_; }
  /// L^dim, the Parseval weight.
  double volume() const { return volume_; }
  std::size_t size() const { return size_; }

  /// Largest retained |kappa_i| under the two-thirds rule: floor(n/3).
  int dealias_cutoff() const { return n_ / 3; }

  ModeIndex mode(std::size_t flat) const;
  std::size_t flat_index(const ModeIndex& kappa) const;
  /// Storage index of -kappa (modulo n).
  std::size_t mirror(std::size_t flat) const { return tables_->mirror[flat]; }

  Wavevector wavevector(std::size_t flat) const;
  double k_squared(std::size_t flat) const { return tables_->k2[flat]; }
  /// |kappa|^2 as an exact integer.
  int kappa_squared(std::size_t flat) const { return tables_->kappa2[flat]; }
  bool in_dealias_band(std::size_t flat) const { return tables_->dealias[flat] != 0; }
  /// True when some component equals -n/2.
  bool is_nyquist(std::size_t flat) const { return tables_->nyquist[flat] != 0; }

  /// Per-axis physical wavenumbers of every mode, component-major.
  const std::vector<double>& k_component(int axis) const { return tables_->k[axis]; }
  const std::vector<double>& k_squared_table() const { return tables_->k2; }

  int kappa_of_storage(int i) const { return i < n_ / 2 ? i : i - n_; }
  int storage_of_kappa(int kappa) const { return kappa < 0 ? kappa + n_ : kappa; }

  bool operator==(const Lattice& other) const {
    return n_ == other.n_ && dim_ == other.dim_ && box_length_ == other.box_length_;
  }

 private:
  struct Tables {
    std::array<std::vector<double>, 3> k;
    std::vector<double> k2;
    std::vector<int> kappa2;
    std::vector<std::size_t> mirror;
    std::vector<unsigned char> dealias;
    std::vector<unsigned char> nyquist;
  };

  Lattice() = default;

  int n_ = 0;
  int dim_ = 0;
  double box_length_ = 0.0;
  double k_unit_ = 0.0;
  double volume_ = 0.0;
  std::size_t size_ = 0;
  std::shared_ptr<const Tables> tables_;
};

/// Throws std::invalid_argument when two lattices differ.
void require_same_lattice(const Lattice& a, const Lattice& b, const char* where);

}  // namespace hyperns
