#include <cmath>
#include <random>
#include <stdexcept>

#include "hyperns/dynamics.hpp"
#include "hyperns/errors.hpp"
#include "hyperns/snapshot.hpp"

namespace hyperns {

SpectralVelocity taylor_green(const Lattice& lattice, double amplitude) {
  const int n = lattice.n();
  const double h = lattice.box_length() / n;
  const double k = lattice.k_unit();
  std::vector<std::vector<double>> phys(static_cast<std::size_t>(lattice.dim()), std::vector<double>(lattice.size()));
  std::size_t idx = 0;
  if (lattice.dim() == 2) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b, ++idx) {
        const double x = k * a * h, y = k * b * h;
        phys[0][idx] = amplitude * std::sin(x) * std::cos(y);
        phys[1][idx] = -amplitude * std::cos(x) * std::sin(y);
      }
    }
  } else {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c, ++idx) {
          const double x = k * a * h, y = k * b * h, z = k * c * h;
          phys[0][idx] = amplitude * std::sin(x) * std::cos(y) * std::cos(z);
          phys[1][idx] = -amplitude * std::cos(x) * std::sin(y) * std::cos(z);
          phys[2][idx] = 0.0;
        }
      }
    }
  }
  return dealias(leray_project(from_physical(lattice, phys)));
}

SpectralVelocity random_velocity(const Lattice& lattice, const RandomSpectrum& spectrum) {
  std::mt19937_64 rng(spectrum.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralVectorField v(lattice);
  const int dim = lattice.dim();
  for (std::size_t f = 1; f < lattice.size(); ++f) {
    const std::size_t g = lattice.mirror(f);
    if (g < f || !lattice.in_dealias_band(f) || lattice.is_nyquist(f)) continue;
    const double k2 = lattice.k_squared(f);
    const double weight = std::pow(k2, 0.5 * spectrum.sigma) * std::exp(-k2 / (spectrum.k_c * spectrum.k_c));
    for (int i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      v.component(i)[f] = weight * Complex(re, im);
      v.component(i)[g] = std::conj(v.component(i)[f]);
    }
  }
  SpectralVelocity u = leray_project(std::move(v));
  const double rms = l2_norm(u.field()) / std::sqrt(lattice.volume());
  if (rms == 0.0) return u;
  SpectralVectorField scaled = u.field();
  const double scale = spectrum.amplitude / rms;
  for (int i = 0; i < dim; ++i) {
    for (auto& c : scaled.component(i)) c *= scale;
  }
  return SpectralVelocity::from_field(std::move(scaled));
}

SpectralVelocity make_initial_condition(const SimConfig& cfg, const Lattice& lattice) {
  switch (cfg.ic.kind) {
    case InitialConditionSpec::Kind::preset:
      if (cfg.ic.name == "taylor-green-2d" || cfg.ic.name == "taylor-green-3d") {
        return taylor_green(lattice, cfg.random.amplitude);
      }
      throw ConfigError("unknown initial-condition preset '" + cfg.ic.name + "'");
    case InitialConditionSpec::Kind::random:
      return random_velocity(lattice, cfg.random);
    case InitialConditionSpec::Kind::snapshot: {
      Snapshot snap = read_snapshot(cfg.ic.name);
      if (!(snap.u.lattice() == lattice)) {
        throw ConfigError("snapshot " + cfg.ic.name + " does not match the configured lattice");
      }
      return dealias(snap.u);
    }
  }
  throw ConfigError("unknown initial condition");
}

}  // namespace hyperns
