#include "hyperns/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hyperns/errors.hpp"

namespace hyperns {

SpectralVectorField::SpectralVectorField(const Lattice& lattice)
    : lattice_(lattice),
      comps_(static_cast<std::size_t>(lattice.dim()), std::vector<Complex>(lattice.size())) {}

SpectralVelocity SpectralVelocity::zero(const Lattice& lattice, double time) {
  return SpectralVelocity(SpectralVectorField(lattice), time);
}

SpectralVelocity SpectralVelocity::from_field(SpectralVectorField field, double time) {
  if (auto violation = find_invariant_violation(field)) throw InvariantError(*violation);
  return SpectralVelocity(std::move(field), time);
}

std::optional<std::string> find_invariant_violation(const SpectralVectorField& field,
                                                    double divergence_tolerance) {
  const Lattice& lat = field.lattice();
  const int dim = field.components();
  for (int i = 0; i < dim; ++i) {
    auto c = field.component(i);
    for (std::size_t f = 0; f < lat.size(); ++f) {
      if (!std::isfinite(c[f].real()) || !std::isfinite(c[f].imag())) {
        return "non-finite coefficient in component " + std::to_string(i);
      }
    }
    if (c[0] != Complex(0.0)) return "mean mode is not zero (component " + std::to_string(i) + ")";
    for (std::size_t f = 0; f < lat.size(); ++f) {
      if (lat.is_nyquist(f) && c[f] != Complex(0.0)) {
        return "Nyquist row coefficient is not zero (component " + std::to_string(i) + ")";
      }
      if (c[lat.mirror(f)] != std::conj(c[f])) {
        return "Hermitian symmetry violated (component " + std::to_string(i) + ")";
      }
    }
  }
  const double div = max_relative_divergence(field);
  if (!(div <= divergence_tolerance)) {
    std::ostringstream os;
    os << "divergence constraint violated (relative divergence " << div << " > "
       << divergence_tolerance << ")";
    return os.str();
  }
  return std::nullopt;
}

SpectralVelocity leray_project(SpectralVectorField v, double time) {
  leray_project_in_place(v);
  return SpectralVelocity(std::move(v), time);
}

void leray_project_in_place(SpectralVectorField& v) {
  const Lattice& lat = v.lattice();
  const int dim = v.components();
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const double k2 = lat.k_squared(f);
    if (f == 0 || lat.is_nyquist(f)) {
      for (int i = 0; i < dim; ++i) v.component(i)[f] = 0.0;
      continue;
    }
    // Second pass removes the roundoff left in k.v by the first.
    for (int pass = 0; pass < 2; ++pass) {
      Complex kdotv = 0.0;
      for (int i = 0; i < dim; ++i) kdotv += lat.k_component(i)[f] * v.component(i)[f];
      const Complex scale = kdotv / k2;
      for (int i = 0; i < dim; ++i) v.component(i)[f] -= lat.k_component(i)[f] * scale;
    }
  }
  for (int i = 0; i < dim; ++i) enforce_hermitian(lat, v.component(i));
}

SpectralVectorField dealias(SpectralVectorField v) {
  const Lattice& lat = v.lattice();
  for (int i = 0; i < v.components(); ++i) {
    auto c = v.component(i);
    for (std::size_t f = 0; f < lat.size(); ++f) {
      if (!lat.in_dealias_band(f)) c[f] = 0.0;
    }
  }
  return v;
}

SpectralVelocity dealias(const SpectralVelocity& u) {
  return SpectralVelocity(dealias(u.field()), u.time());
}

double max_relative_divergence(const SpectralVectorField& field) {
  const Lattice& lat = field.lattice();
  double worst = 0.0;
  for (std::size_t f = 1; f < lat.size(); ++f) {
    Complex kdotc = 0.0;
    double mag2 = 0.0;
    for (int i = 0; i < field.components(); ++i) {
      const Complex c = field.component(i)[f];
      kdotc += lat.k_component(i)[f] * c;
      mag2 += std::norm(c);
    }
    if (mag2 == 0.0) continue;
    const double rel = std::abs(kdotc) / std::sqrt(lat.k_squared(f) * mag2);
    if (std::isnan(rel)) return rel;
    worst = std::max(worst, rel);
  }
  return worst;
}

double sobolev_norm(const SpectralVectorField& field, SobolevIndex index) {
  const Lattice& lat = field.lattice();
  double sum = 0.0;
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const double k2 = lat.k_squared(f);
    double weight = 1.0;
    if (index.variant == SobolevIndex::Variant::homogeneous) {
      if (f == 0) continue;
      weight = index.s == 0.0 ? 1.0 : std::pow(k2, index.s);
    } else {
      weight = index.s == 0.0 ? 1.0 : std::pow(1.0 + k2, index.s);
    }
    double mag2 = 0.0;
    for (int i = 0; i < field.components(); ++i) mag2 += std::norm(field.component(i)[f]);
    sum += weight * mag2;
  }
  return std::sqrt(sum * lat.volume());
}

double sobolev_norm(const SpectralVelocity& u, SobolevIndex index) {
  return sobolev_norm(u.field(), index);
}

double l2_norm(const SpectralVectorField& field) {
  return sobolev_norm(field, {0.0, SobolevIndex::Variant::inhomogeneous});
}

double inner_product(const SpectralVectorField& a, const SpectralVectorField& b) {
  require_same_lattice(a.lattice(), b.lattice(), "inner_product");
  double sum = 0.0;
  for (int i = 0; i < a.components(); ++i) {
    auto ca = a.component(i);
    auto cb = b.component(i);
    for (std::size_t f = 0; f < ca.size(); ++f) sum += (std::conj(ca[f]) * cb[f]).real();
  }
  return sum * a.lattice().volume();
}

std::vector<std::vector<double>> to_physical(const SpectralVectorField& field) {
  FourierTransform t(field.lattice());
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(field.components()));
  for (int i = 0; i < field.components(); ++i) out.push_back(t.inverse(field.component(i)));
  return out;
}

SpectralVectorField from_physical(const Lattice& lattice, std::span<const std::vector<double>> components) {
  if (static_cast<int>(components.size()) != lattice.dim()) {
    throw std::invalid_argument("from_physical: expected one array per dimension");
  }
  FourierTransform t(lattice);
  SpectralVectorField out(lattice);
  for (int i = 0; i < lattice.dim(); ++i) t.forward(components[static_cast<std::size_t>(i)], out.component(i));
  return out;
}

}  // namespace hyperns
