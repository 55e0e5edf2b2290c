#include "bbq/field.hpp"

#include <algorithm>
#include <cmath>

namespace bbq {

bool RealField::finite() const {
  for (double v : samples)
    if (!std::isfinite(v)) return false;
  return true;
}

double RealField::max_abs() const {
  double m = 0.0;
  for (double v : samples) m = std::max(m, std::abs(v));
  return m;
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const Complex& c : coeffs) m = std::max(m, std::abs(c));
  return m;
}

bool SpectralField::finite() const {
  for (const Complex& c : coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(grid, o.grid, "SpectralField::operator+=");
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(grid, o.grid, "SpectralField::operator-=");
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double a) {
  for (Complex& c : coeffs) c *= a;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) {
  a += b;
  return a;
}

SpectralField operator-(SpectralField a, const SpectralField& b) {
  a -= b;
  return a;
}

SpectralField operator*(double a, SpectralField f) {
  f *= a;
  return f;
}

double hermitian_symmetry_error(const SpectralField& f) {
  const int n = f.grid.n;
  double err = 0.0;
  for (int i1 = 0; i1 < n; ++i1) {
    const int m1 = (n - i1) % n;
    for (int i2 = 0; i2 < n; ++i2) {
      const int m2 = (n - i2) % n;
      err = std::max(err, std::abs(f.at(i1, i2) - std::conj(f.at(m1, m2))));
    }
  }
  return err;
}

double divergence_certificate_error(const VectorField& v) {
  const GridSpec& g = v.grid();
  const int n = g.n;
  double num = 0.0;
  double den = 0.0;
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = g.xi(g.deriv_wavenumber(i1));
    for (int i2 = 0; i2 < n; ++i2) {
      const double x2 = g.xi(g.deriv_wavenumber(i2));
      const Complex a = v.x.at(i1, i2);
      const Complex b = v.y.at(i1, i2);
      num = std::max(num, std::abs(x1 * a + x2 * b));
      den = std::max(den, std::max(std::abs(a), std::abs(b)));
    }
  }
  // Divergence picks up one |ξ| factor; normalize it away so the certificate
  // threshold is grid independent.
  const double scale = std::max(1.0, g.nyquist());
  return den == 0.0 ? 0.0 : num / (den * scale);
}

void require_same_grid(const GridSpec& a, const GridSpec& b,
                       const char* where) {
  if (!(a == b))
    throw ParameterError(std::string(where) + ": fields on different grids");
}

}  // namespace bbq
