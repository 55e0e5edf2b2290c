#include "bbq/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace bbq {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian");

namespace {

constexpr char kMagic[4] = {'B', 'B', 'Q', 'F'};
constexpr std::uint32_t kVersion = 1;

struct Header {
  std::uint32_t version;
  std::uint32_t n;
  double length;
  std::uint8_t kind;  // 0 = real, 1 = spectral
};

void write_payload(const std::filesystem::path& path, const Header& h,
                   const void* data, std::size_t bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("snapshot: cannot open " + tmp.string());
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&h.version), 4);
    out.write(reinterpret_cast<const char*>(&h.n), 4);
    out.write(reinterpret_cast<const char*>(&h.length), 8);
    out.write(reinterpret_cast<const char*>(&h.kind), 1);
    out.write(static_cast<const char*>(data), std::streamsize(bytes));
    if (!out) throw DataError("snapshot: short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Header read_header(std::ifstream& in, const std::filesystem::path& path) {
  char magic[4];
  Header h{};
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&h.version), 4);
  in.read(reinterpret_cast<char*>(&h.n), 4);
  in.read(reinterpret_cast<char*>(&h.length), 8);
  in.read(reinterpret_cast<char*>(&h.kind), 1);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("snapshot: " + path.string() + " is not a BBQF file");
  if (h.version != kVersion)
    throw DataError("snapshot: unsupported version in " + path.string());
  if (h.kind > 1)
    throw DataError("snapshot: unknown field kind in " + path.string());
  return h;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const RealField& f) {
  Header h{kVersion, std::uint32_t(f.grid.n), f.grid.domain_length, 0};
  write_payload(path, h, f.samples.data(), f.samples.size() * sizeof(double));
}

void write_snapshot(const std::filesystem::path& path, const SpectralField& f) {
  Header h{kVersion, std::uint32_t(f.grid.n), f.grid.domain_length, 1};
  write_payload(path, h, f.coeffs.data(), f.coeffs.size() * sizeof(Complex));
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("snapshot: cannot open " + path.string());
  const Header h = read_header(in, path);
  const GridSpec grid = GridSpec::make(int(h.n), h.length);
  if (h.kind == 0) {
    RealField f = RealField::zeros(grid);
    in.read(reinterpret_cast<char*>(f.samples.data()),
            std::streamsize(f.samples.size() * sizeof(double)));
    if (!in) throw DataError("snapshot: truncated payload in " + path.string());
    return f;
  }
  SpectralField f = SpectralField::zeros(grid);
  in.read(reinterpret_cast<char*>(f.coeffs.data()),
          std::streamsize(f.coeffs.size() * sizeof(Complex)));
  if (!in) throw DataError("snapshot: truncated payload in " + path.string());
  return f;
}

RealField read_real_snapshot(const std::filesystem::path& path) {
  Snapshot s = read_snapshot(path);
  if (auto* f = std::get_if<RealField>(&s)) return std::move(*f);
  throw DataError("snapshot: " + path.string() + " holds a spectral field");
}

SpectralField read_spectral_snapshot(const std::filesystem::path& path) {
  Snapshot s = read_snapshot(path);
  if (auto* f = std::get_if<SpectralField>(&s)) return std::move(*f);
  throw DataError("snapshot: " + path.string() + " holds a real field");
}

}  // namespace bbq
