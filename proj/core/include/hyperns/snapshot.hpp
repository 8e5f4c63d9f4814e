#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "hyperns/spectral_field.hpp"

namespace hyperns {

struct SimConfig;

/// On-disk layout (all integers and floats little-endian):
///
///   bytes 0..3    magic "HYPF"
///   uint32        format version (kSnapshotVersion)
///   uint32        header length H in bytes
///   H bytes       UTF-8 "key=value\n" lines: dim, n, box_length, t, nu, eps, symbol
///   payload       dim * n^dim complex coefficients as (re, im) float64 pairs;
///                 component 0 first, modes in row-major storage order with
///                 kappa = 0, 1, ..., n/2-1, -n/2, ..., -1 along each axis.
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct SnapshotHeader {
  int dim = 0;
  int n = 0;
  double box_length = 0.0;
  double t = 0.0;
  double nu = 0.0;
  double eps = 0.0;
  std::string symbol;
};

struct Snapshot {
  SnapshotHeader header;
  SpectralVelocity u;
};

void write_snapshot(std::ostream& out, const SpectralVelocity& u, const SimConfig& cfg);
/// Throws IoError when the file cannot be written.
void write_snapshot(const std::filesystem::path& path, const SpectralVelocity& u, const SimConfig& cfg);

/// Throws IoError for a bad magic tag, unsupported version, malformed header
/// or truncated/oversized payload, and InvariantError naming the violated
/// invariant (Hermitian symmetry, divergence, zero mean, Nyquist rows).
Snapshot read_snapshot(std::istream& in, const std::string& source_name = "<stream>");
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace hyperns
