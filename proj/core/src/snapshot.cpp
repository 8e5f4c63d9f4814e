#include "hyperns/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "hyperns/config.hpp"
#include "hyperns/csv.hpp"
#include "hyperns/errors.hpp"

namespace hyperns {

namespace {

constexpr char kMagic[4] = {'H', 'Y', 'P', 'F'};

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string& buf, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

void read_exact(std::istream& in, void* dst, std::size_t count, const std::string& source, const char* what) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count) {
    throw IoError(source + ": truncated snapshot (while reading " + what + ")");
  }
}

SnapshotHeader parse_header(const std::string& text, const std::string& source) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError(source + ": malformed header line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw IoError(source + ": header is missing '" + key + "'");
    return it->second;
  };
  SnapshotHeader h;
  try {
    h.dim = std::stoi(get("dim"));
    h.n = std::stoi(get("n"));
    h.box_length = std::stod(get("box_length"));
    h.t = std::stod(get("t"));
    h.nu = std::stod(get("nu"));
    h.eps = std::stod(get("eps"));
  } catch (const std::logic_error&) {
    throw IoError(source + ": non-numeric header value");
  }
  h.symbol = get("symbol");
  return h;
}

}  // namespace

void write_snapshot(std::ostream& out, const SpectralVelocity& u, const SimConfig& cfg) {
  const Lattice& lat = u.lattice();
  std::string header;
  header += "dim=" + std::to_string(lat.dim()) + "\n";
  header += "n=" + std::to_string(lat.n()) + "\n";
  header += "box_length=" + format_double(lat.box_length()) + "\n";
  header += "t=" + format_double(u.time()) + "\n";
  header += "nu=" + format_double(cfg.nu) + "\n";
  header += "eps=" + format_double(cfg.eps) + "\n";
  header += "symbol=" + symbol_spec_text(cfg.symbol) + "\n";

  std::string buf(kMagic, kMagic + 4);
  put_u32(buf, kSnapshotVersion);
  put_u32(buf, static_cast<std::uint32_t>(header.size()));
  buf += header;
  buf.reserve(buf.size() + static_cast<std::size_t>(lat.dim()) * lat.size() * 16);
  for (int i = 0; i < lat.dim(); ++i) {
    for (const Complex& c : u.component(i)) {
      put_f64(buf, c.real());
      put_f64(buf, c.imag());
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_snapshot(const std::filesystem::path& path, const SpectralVelocity& u, const SimConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_snapshot(out, u, cfg);
  if (!out) throw IoError("failed writing " + path.string());
}

Snapshot read_snapshot(std::istream& in, const std::string& source) {
  char magic[4];
  read_exact(in, magic, 4, source, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw IoError(source + ": not a snapshot (bad magic tag)");
  unsigned char word[4];
  read_exact(in, word, 4, source, "version");
  const std::uint32_t version = get_u32(word);
  if (version != kSnapshotVersion) {
    throw IoError(source + ": unsupported snapshot version " + std::to_string(version));
  }
  read_exact(in, word, 4, source, "header length");
  const std::uint32_t header_len = get_u32(word);
  if (header_len > (1u << 20)) throw IoError(source + ": implausible header length");
  std::string header_text(header_len, '\0');
  read_exact(in, header_text.data(), header_len, source, "header");
  const SnapshotHeader header = parse_header(header_text, source);

  Lattice lattice = [&] {
    try {
      return Lattice::build(header.n, header.dim, header.box_length);
    } catch (const std::invalid_argument& e) {
      throw IoError(source + ": invalid lattice in header: " + e.what());
    }
  }();

  const std::size_t payload = static_cast<std::size_t>(lattice.dim()) * lattice.size() * 16;
  std::vector<unsigned char> bytes(payload);
  read_exact(in, bytes.data(), payload, source, "payload");
  if (in.peek() != std::char_traits<char>::eof()) throw IoError(source + ": trailing bytes after payload");

  SpectralVectorField field(lattice);
  const unsigned char* p = bytes.data();
  for (int i = 0; i < lattice.dim(); ++i) {
    for (Complex& c : field.component(i)) {
      c = Complex(get_f64(p), get_f64(p + 8));
      p += 16;
    }
  }
  if (auto violation = find_invariant_violation(field)) {
    throw InvariantError(source + ": " + *violation);
  }
  return Snapshot{header, SpectralVelocity::from_field(std::move(field), header.t)};
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_snapshot(in, path.string());
}

}  // namespace hyperns
