#include "hyperns/lattice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hyperns {

Lattice Lattice::build(int n_per_dim, int dim, double box_length) {
  if (n_per_dim < 4 || n_per_dim % 2 != 0) {
    throw std::invalid_argument("lattice: n_per_dim must be even and >= 4, got " +
                                std::to_string(n_per_dim));
  }
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("lattice: dim must be 2 or 3, got " + std::to_string(dim));
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw std::invalid_argument("lattice: box_length must be positive and finite");
  }

  Lattice lat;
  lat.n_ = n_per_dim;
  lat.dim_ = dim;
  lat.box_length_ = box_length;
  lat.k_unit_ = 2.0 * std::numbers::pi / box_length;
  lat.volume_ = std::pow(box_length, dim);
  lat.size_ = 1;
  for (int d = 0; d < dim; ++d) lat.size_ *= static_cast<std::size_t>(n_per_dim);

  auto tables = std::make_shared<Tables>();
  for (auto& axis : tables->k) axis.assign(lat.size_, 0.0);
  tables->k2.resize(lat.size_);
  tables->kappa2.resize(lat.size_);
  tables->mirror.resize(lat.size_);
  tables->dealias.resize(lat.size_);
  tables->nyquist.resize(lat.size_);

  const int cutoff = lat.dealias_cutoff();
  for (std::size_t f = 0; f < lat.size_; ++f) {
    const ModeIndex kappa = lat.mode(f);
    ModeIndex neg{};
    double k2 = 0.0;
    int kappa2 = 0;
    bool keep = true;
    bool nyq = false;
    for (int d = 0; d < dim; ++d) {
      const double k = lat.k_unit_ * kappa[d];
      tables->k[d][f] = k;
      k2 += k * k;
      kappa2 += kappa[d] * kappa[d];
      keep = keep && std::abs(kappa[d]) <= cutoff;
      nyq = nyq || kappa[d] == -n_per_dim / 2;
      // -(-n/2) wraps back to -n/2.
      neg[d] = kappa[d] == -n_per_dim / 2 ? kappa[d] : -kappa[d];
    }
    tables->k2[f] = k2;
    tables->kappa2[f] = kappa2;
    tables->dealias[f] = keep ? 1 : 0;
    tables->nyquist[f] = nyq ? 1 : 0;
    tables->mirror[f] = lat.flat_index(neg);
  }
  lat.tables_ = std::move(tables);
  return lat;
}

ModeIndex Lattice::mode(std::size_t flat) const {
  ModeIndex kappa{0, 0, 0};
  const auto n = static_cast<std::size_t>(n_);
  for (int d = dim_ - 1; d >= 0; --d) {
    kappa[d] = kappa_of_storage(static_cast<int>(flat % n));
    flat /= n;
  }
  return kappa;
}

std::size_t Lattice::flat_index(const ModeIndex& kappa) const {
  std::size_t flat = 0;
  for (int d = 0; d < dim_; ++d) {
    if (kappa[d] < -n_ / 2 || kappa[d] >= n_ / 2) {
      throw std::out_of_range("lattice: mode component outside [-n/2, n/2)");
    }
    flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(storage_of_kappa(kappa[d]));
  }
  return flat;
}

Wavevector Lattice::wavevector(std::size_t flat) const {
  return {tables_->k[0][flat], tables_->k[1][flat], tables_->k[2][flat]};
}

void require_same_lattice(const Lattice& a, const Lattice& b, const char* where) {
  if (!(a == b)) throw std::invalid_argument(std::string(where) + ": lattice mismatch");
}

}  // namespace hyperns
