#pragma once

#include <complex>
#include <vector>

#include "bbq/grid.hpp"

namespace bbq {

using Complex = std::complex<double>;

// Point samples of a real scalar field, row-major [i1*n + i2] with
// x = (L/n)·(i1, i2).
struct RealField {
  GridSpec grid;
  std::vector<double> samples;

  static RealField zeros(const GridSpec& g) {
    return RealField{g, std::vector<double>(g.size(), 0.0)};
  }

  double& at(int i1, int i2) { return samples[std::size_t(i1) * grid.n + i2]; }
  double at(int i1, int i2) const {
    return samples[std::size_t(i1) * grid.n + i2];
  }

  bool finite() const;
  double max_abs() const;
};

// Fourier coefficients of a real scalar field, FFT order, row-major.
// Convention: coeff(k) = (1/n²) Σ_x f(x) e^{-i 2π k·x / L}, so a constant
// field c has coeff(0,0) = c and f(x) = Σ_k coeff(k) e^{i 2π k·x / L}.
struct SpectralField {
  GridSpec grid;
  std::vector<Complex> coeffs;

  static SpectralField zeros(const GridSpec& g) {
    return SpectralField{g, std::vector<Complex>(g.size(), Complex{})};
  }

  Complex& at(int i1, int i2) { return coeffs[std::size_t(i1) * grid.n + i2]; }
  Complex at(int i1, int i2) const {
    return coeffs[std::size_t(i1) * grid.n + i2];
  }
  Complex& at_wavenumber(int k1, int k2) {
    return at(grid.index_of(k1), grid.index_of(k2));
  }
  Complex at_wavenumber(int k1, int k2) const {
    return at(grid.index_of(k1), grid.index_of(k2));
  }

  Complex mean() const { return coeffs[0]; }
  double max_abs() const;
  bool finite() const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double a);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double a, SpectralField f);

// Velocity-like pair (u1, u2). divergence_free is a certificate set by the
// operations that guarantee it (leray_project, perp_gradient, biot_savart).
struct VectorField {
  SpectralField x;
  SpectralField y;
  bool divergence_free = false;

  const GridSpec& grid() const { return x.grid; }
  static VectorField zeros(const GridSpec& g) {
    return VectorField{SpectralField::zeros(g), SpectralField::zeros(g), false};
  }
  double max_abs() const { return std::max(x.max_abs(), y.max_abs()); }
  bool finite() const { return x.finite() && y.finite(); }
};

// max_k |c(-k) - conj(c(k))| over paired modes.
double hermitian_symmetry_error(const SpectralField& f);

// max_k |ξ·û(k)| / max_k |û(k)| (0 for the zero field). The certificate
// demands this stay below 1e-12.
double divergence_certificate_error(const VectorField& v);

void require_same_grid(const GridSpec& a, const GridSpec& b,
                       const char* where);

}  // namespace bbq
