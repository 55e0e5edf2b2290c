#pragma once

#include <filesystem>
#include <variant>

#include "bbq/field.hpp"

namespace bbq {

// Field snapshot file: magic "BBQF", version u32, n u32, L f64,
// kind u8 (0 = real, 1 = spectral), then row-major little-endian f64 samples
// or interleaved (re, im) f64 coefficients. Writes go to a temp file in the
// same directory followed by an atomic rename.
void write_snapshot(const std::filesystem::path& path, const RealField& f);
void write_snapshot(const std::filesystem::path& path, const SpectralField& f);

using Snapshot = std::variant<RealField, SpectralField>;
Snapshot read_snapshot(const std::filesystem::path& path);
RealField read_real_snapshot(const std::filesystem::path& path);
SpectralField read_spectral_snapshot(const std::filesystem::path& path);

}  // namespace bbq
