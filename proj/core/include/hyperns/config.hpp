#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "hyperns/dynamics.hpp"

namespace hyperns {

/// Parses "key = value" lines ('#' starts a comment). Recognized keys:
/// nu, eps, alpha, mu, symbol (power | kernel:PATH | table:PATH), n, dim,
/// box_length, dt, t_end, output_every, ic (taylor-green-2d |
/// taylor-green-3d | random | snapshot:PATH), seed, sigma, k_c, amplitude,
/// s, eta, nonlinear (true | false).
///
/// Required: nu, eps, symbol, n, dim, dt, t_end, ic, and alpha for power
/// symbols. Unknown or duplicate keys, missing required keys, malformed
/// values and failed validation all raise ConfigError with the line number
/// when one applies.
SimConfig parse_config(const std::string& text);
SimConfig read_config(const std::filesystem::path& path);

/// Every field in a fixed order with 17 significant digits; parsing the
/// result reproduces the same SimConfig.
std::string canonical_config_text(const SimConfig& cfg);

/// 16 hex digits of FNV-1a (64-bit) over the canonical text.
std::string config_hash(const SimConfig& cfg);
std::string content_hash(const std::string& text);

/// "power:MU:ALPHA", "kernel:PATH" or "table:PATH".
std::string symbol_spec_text(const SymbolChoice& symbol);

bool operator==(const SimConfig& a, const SimConfig& b);

/// Library version, "MAJOR.MINOR.PATCH".
const char* version();

}  // namespace hyperns
