#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "hyperns/errors.hpp"
#include "hyperns/lattice.hpp"
#include "hyperns/spectral_field.hpp"
#include "hyperns/transform.hpp"
#include "oracles.hpp"

using namespace hyperns;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> random_real(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(size);
  for (auto& v : x) v = g(rng);
  return x;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST(Lattice, SmallestTwoDimensionalGrid) {
  const Lattice lat = Lattice::build(4, 2, kTwoPi);
  EXPECT_EQ(lat.size(), 16u);
  EXPECT_DOUBLE_EQ(lat.k_unit(), 1.0);
  std::set<int> comps;
  for (std::size_t f = 0; f < lat.size(); ++f) comps.insert(lat.mode(f)[0]);
  EXPECT_EQ(comps, (std::set<int>{-2, -1, 0, 1}));
}

TEST(Lattice, ThreeDimensionalModeCountAndNyquist) {
  const Lattice lat = Lattice::build(8, 3, kTwoPi);
  EXPECT_EQ(lat.size(), 512u);
  int max_abs_component = 0;
  for (std::size_t f = 0; f < lat.size(); ++f) {
    for (int a = 0; a < 3; ++a) max_abs_component = std::max(max_abs_component, std::abs(lat.mode(f)[a]));
  }
  EXPECT_EQ(max_abs_component, 4);
}

TEST(Lattice, HalfBoxDoublesWavenumbers) {
  const Lattice lat = Lattice::build(6, 2, std::numbers::pi);
  EXPECT_DOUBLE_EQ(lat.k_unit(), 2.0);
  EXPECT_DOUBLE_EQ(std::sqrt(lat.k_squared(lat.flat_index({1, 0, 0}))), 2.0);
}

TEST(Lattice, RejectsBadShapes) {
  EXPECT_THROW(Lattice::build(5, 2, kTwoPi), std::invalid_argument);
  EXPECT_THROW(Lattice::build(2, 2, kTwoPi), std::invalid_argument);
  EXPECT_THROW(Lattice::build(8, 4, kTwoPi), std::invalid_argument);
  EXPECT_THROW(Lattice::build(8, 2, 0.0), std::invalid_argument);
  EXPECT_THROW(Lattice::build(8, 2, -1.0), std::invalid_argument);
}

TEST(Lattice, MirrorAndZeroWavenumber) {
  const Lattice lat = Lattice::build(8, 3, kTwoPi);
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const auto k = lat.mode(f);
    EXPECT_EQ(lat.k_squared(f) == 0.0, k[0] == 0 && k[1] == 0 && k[2] == 0);
    if (!lat.is_nyquist(f)) {
      const auto m = lat.mode(lat.mirror(f));
      for (int a = 0; a < 3; ++a) EXPECT_EQ(m[a], -k[a]);
    }
    EXPECT_EQ(f, oracle::flat_of(oracle::kappa_of(f, 8, 3), 8, 3));
  }
}

TEST(Transform, CosineHasHalfAmplitudeAtPlusMinusKappa) {
  const Lattice lat = Lattice::build(16, 2, kTwoPi);
  std::vector<double> u(lat.size());
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const int ix = static_cast<int>(f / 16);
    u[f] = std::cos(kTwoPi * ix / 16.0);
  }
  const auto c = forward_transform(lat, u);
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const auto k = lat.mode(f);
    const double expected = (std::abs(k[0]) == 1 && k[1] == 0) ? 0.5 : 0.0;
    EXPECT_NEAR(c[f].real(), expected, 1e-15);
    EXPECT_NEAR(c[f].imag(), 0.0, 1e-15);
  }
  const auto back = inverse_transform(lat, c);
  for (std::size_t f = 0; f < lat.size(); ++f) EXPECT_NEAR(back[f], u[f], 1e-14);
}

TEST(Transform, ConstantFieldIsTheMeanMode) {
  const Lattice lat = Lattice::build(8, 3, kTwoPi);
  const std::vector<double> u(lat.size(), 3.0);
  const auto c = forward_transform(lat, u);
  EXPECT_NEAR(c[0].real(), 3.0, 1e-15);
  for (std::size_t f = 1; f < lat.size(); ++f) EXPECT_LT(std::abs(c[f]), 1e-15);
  for (double v : inverse_transform(lat, c)) EXPECT_NEAR(v, 3.0, 1e-14);
}

TEST(Transform, RoundTripOnRandomFields) {
  for (int dim : {2, 3}) {
    const Lattice lat = Lattice::build(dim == 2 ? 32 : 16, dim, 3.0);
    const auto u = random_real(lat.size(), 7 + dim);
    const auto back = inverse_transform(lat, forward_transform(lat, u));
    double err = 0.0;
    for (std::size_t f = 0; f < u.size(); ++f) err = std::max(err, std::abs(back[f] - u[f]));
    EXPECT_LE(err / max_abs(u), 1e-12) << "dim " << dim;
    EXPECT_EQ(hermitian_defect(lat, forward_transform(lat, u)), 0.0);
  }
}

TEST(Transform, SpectralRoundTripOnHermitianData) {
  const Lattice lat = Lattice::build(16, 2, kTwoPi);
  const SpectralVelocity u = oracle::random_field(lat, 3);
  const auto c = std::vector<Complex>(u.component(0).begin(), u.component(0).end());
  const auto again = forward_transform(lat, inverse_transform(lat, c));
  double err = 0.0, ref = 0.0;
  for (std::size_t f = 0; f < c.size(); ++f) {
    err = std::max(err, std::abs(again[f] - c[f]));
    ref = std::max(ref, std::abs(c[f]));
  }
  EXPECT_LE(err / ref, 1e-12);
}

TEST(Transform, RejectsNonHermitianInput) {
  const Lattice lat = Lattice::build(8, 2, kTwoPi);
  std::vector<Complex> c(lat.size());
  c[lat.flat_index({1, 0, 0})] = Complex(1.0, 0.0);
  EXPECT_THROW(inverse_transform(lat, c), InvariantError);
}

TEST(Transform, RejectsShapeMismatch) {
  const Lattice lat = Lattice::build(8, 2, kTwoPi);
  EXPECT_THROW(forward_transform(lat, std::vector<double>(10)), std::invalid_argument);
}

TEST(Leray, RemovesComponentParallelToK) {
  const Lattice lat = Lattice::build(8, 3, kTwoPi);
  SpectralVectorField v(lat);
  const std::size_t f = lat.flat_index({1, 0, 0});
  v.component(0)[f] = 1.0;
  v.component(0)[lat.mirror(f)] = 1.0;
  const SpectralVelocity p = leray_project(v);
  for (int i = 0; i < 3; ++i) {
    for (auto c : p.component(i)) EXPECT_EQ(c, Complex{});
  }
}

TEST(Leray, KeepsComponentOrthogonalToK) {
  const Lattice lat = Lattice::build(8, 3, kTwoPi);
  SpectralVectorField v(lat);
  const std::size_t f = lat.flat_index({1, 0, 0});
  v.component(1)[f] = 1.0;
  v.component(1)[lat.mirror(f)] = 1.0;
  const SpectralVelocity p = leray_project(v);
  EXPECT_EQ(p.field(), v);
}

TEST(Leray, IdempotentAndDivergenceFree) {
  for (int dim : {2, 3}) {
    const Lattice lat = Lattice::build(16, dim, 2.5);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    SpectralVectorField v(lat);
    for (int i = 0; i < dim; ++i) {
      for (auto& c : v.component(i)) c = Complex(g(rng), g(rng));
    }
    const SpectralVelocity once = leray_project(v);
    const SpectralVelocity twice = leray_project(once.field());
    double diff = 0.0, ref = 0.0;
    for (int i = 0; i < dim; ++i) {
      for (std::size_t f = 0; f < lat.size(); ++f) {
        diff = std::max(diff, std::abs(once.component(i)[f] - twice.component(i)[f]));
        ref = std::max(ref, std::abs(once.component(i)[f]));
      }
    }
    EXPECT_LE(diff / ref, 1e-14);
    EXPECT_LE(max_relative_divergence(once.field()), 1e-13);
  }
}

TEST(Dealias, TwoThirdsRuleOnEightPoints) {
  const Lattice lat = Lattice::build(8, 3, kTwoPi);
  EXPECT_EQ(lat.dealias_cutoff(), 2);
  EXPECT_FALSE(lat.in_dealias_band(lat.flat_index({3, 0, 0})));
  EXPECT_TRUE(lat.in_dealias_band(lat.flat_index({2, 1, 0})));
}

TEST(Dealias, TwelvePointCutoff) {
  const Lattice lat = Lattice::build(12, 2, kTwoPi);
  SpectralVectorField v(lat);
  for (int i = 0; i < 2; ++i) {
    for (auto& c : v.component(i)) c = 1.0;
  }
  const SpectralVectorField d = dealias(v);
  EXPECT_EQ(d.component(0)[lat.flat_index({4, 0, 0})], Complex(1.0));
  EXPECT_EQ(d.component(0)[lat.flat_index({5, 0, 0})], Complex{});
  EXPECT_EQ(d.component(1)[lat.flat_index({0, -5, 0})], Complex{});
}

TEST(Dealias, Idempotent) {
  const Lattice lat = Lattice::build(16, 2, kTwoPi);
  SpectralVectorField v(lat);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 2; ++i) {
    for (auto& c : v.component(i)) c = Complex(g(rng), g(rng));
  }
  const SpectralVectorField once = dealias(v);
  EXPECT_EQ(dealias(once), once);
}

TEST(Sobolev, SingleModeHomogeneousOrderOne) {
  const Lattice lat = Lattice::build(16, 2, kTwoPi);
  SpectralVectorField v(lat);
  const std::size_t f = lat.flat_index({0, 2, 0});
  v.component(0)[f] = 0.5;
  v.component(0)[lat.mirror(f)] = 0.5;
  const SpectralVelocity u = SpectralVelocity::from_field(v);
  const double l2 = std::sqrt(kTwoPi * kTwoPi * 0.5);
  EXPECT_NEAR(l2_norm(u.field()), l2, 1e-14);
  EXPECT_NEAR(sobolev_norm(u, {1.0, SobolevIndex::Variant::homogeneous}), 2.0 * l2, 1e-13);
}

TEST(Sobolev, OrderZeroVariantsAgree) {
  const Lattice lat = Lattice::build(16, 3, 2.0);
  const SpectralVelocity u = oracle::random_field(lat, 9);
  const double l2 = l2_norm(u.field());
  EXPECT_NEAR(sobolev_norm(u, {0.0, SobolevIndex::Variant::homogeneous}), l2, 1e-13 * l2);
  EXPECT_NEAR(sobolev_norm(u, {0.0, SobolevIndex::Variant::inhomogeneous}), l2, 1e-13 * l2);
}

TEST(Sobolev, MatchesDirectSum) {
  const Lattice lat = Lattice::build(16, 2, 3.0);
  const SpectralVelocity u = oracle::random_field(lat, 21);
  const double hom = oracle::weighted_norm(u.field(), [](double k2) { return k2 * k2; });
  const double inh = oracle::weighted_norm(u.field(), [](double k2) { return (1.0 + k2) * (1.0 + k2); });
  EXPECT_NEAR(sobolev_norm(u, {2.0, SobolevIndex::Variant::homogeneous}), hom, 1e-13 * hom);
  EXPECT_NEAR(sobolev_norm(u, {2.0, SobolevIndex::Variant::inhomogeneous}), inh, 1e-13 * inh);
}

TEST(Sobolev, ParsevalAgainstPhysicalSpace) {
  const Lattice lat = Lattice::build(32, 2, 1.7);
  const SpectralVelocity u = oracle::random_field(lat, 4);
  const auto phys = to_physical(u.field());
  double sum = 0.0;
  for (const auto& comp : phys) {
    for (double v : comp) sum += v * v;
  }
  const double physical = std::sqrt(sum * lat.volume() / static_cast<double>(lat.size()));
  EXPECT_NEAR(l2_norm(u.field()), physical, 1e-12 * physical);
}

TEST(SpectralVelocity, ConstructionNamesTheViolatedInvariant) {
  const Lattice lat = Lattice::build(8, 2, kTwoPi);
  SpectralVectorField v(lat);
  const std::size_t f = lat.flat_index({1, 0, 0});
  v.component(1)[f] = Complex(1.0, 0.0);
  try {
    SpectralVelocity::from_field(v);
    FAIL() << "expected an invariant error";
  } catch (const InvariantError& e) {
    EXPECT_NE(std::string(e.what()).find("Hermitian"), std::string::npos) << e.what();
  }
  v.component(1)[lat.mirror(f)] = Complex(1.0, 0.0);
  v.component(0)[f] = Complex(1.0, 0.0);
  v.component(0)[lat.mirror(f)] = Complex(1.0, 0.0);
  try {
    SpectralVelocity::from_field(v);
    FAIL() << "expected an invariant error";
  } catch (const InvariantError& e) {
    EXPECT_NE(std::string(e.what()).find("diverg"), std::string::npos) << e.what();
  }
  SpectralVectorField mean(lat);
  mean.component(0)[0] = 1.0;
  EXPECT_THROW(SpectralVelocity::from_field(mean), InvariantError);
}

TEST(SpectralVelocity, NyquistRowsAreZero) {
  const Lattice lat = Lattice::build(8, 2, kTwoPi);
  const SpectralVelocity u = leray_project(from_physical(lat, std::vector<std::vector<double>>{
                                                                 random_real(lat.size(), 1), random_real(lat.size(), 2)}));
  for (std::size_t f = 0; f < lat.size(); ++f) {
    if (lat.is_nyquist(f)) {
      EXPECT_EQ(u.component(0)[f], Complex{});
      EXPECT_EQ(u.component(1)[f], Complex{});
    }
  }
}
