#pragma once

#include <cmath>

#include "bbq/rng.hpp"
#include "bbq/spectral_ops.hpp"

namespace bbq::testing {

// Hermitian random field with integer-wavenumber moduli in [k_lo, k_hi];
// k_hi = 0 fills the whole grid below the Nyquist rows.
inline SpectralField random_field(const GridSpec& g, std::uint64_t seed,
                                  int k_lo = 1, int k_hi = 0) {
  if (k_hi == 0) k_hi = g.n / 2 - 1;
  SpectralField f = SpectralField::zeros(g);
  for (int k1 = -k_hi; k1 <= k_hi; ++k1)
    for (int k2 = -k_hi; k2 <= k_hi; ++k2) {
      if (k1 < 0 || (k1 == 0 && k2 <= 0)) continue;
      const double kk = std::sqrt(double(k1) * k1 + double(k2) * k2);
      if (kk < k_lo || kk > k_hi) continue;
      std::uint64_t ms = mode_stream(seed, k1, k2);
      const Complex c(uniform_pm1(ms), uniform_pm1(ms));
      f.at_wavenumber(k1, k2) = c;
      f.at_wavenumber(-k1, -k2) = std::conj(c);
    }
  return f;
}

inline double max_coeff_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    m = std::max(m, std::abs(a.coeffs[i] - b.coeffs[i]));
  return m;
}

// cos(2π(k1 x1 + k2 x2)/L) with amplitude a.
inline SpectralField harmonic(const GridSpec& g, int k1, int k2,
                              double a = 1.0) {
  SpectralField f = SpectralField::zeros(g);
  f.at_wavenumber(k1, k2) = Complex(0.5 * a, 0.0);
  f.at_wavenumber(-k1, -k2) = Complex(0.5 * a, 0.0);
  return f;
}

}  // namespace bbq::testing
