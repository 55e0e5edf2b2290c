#include "bbq/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bbq/fft.hpp"

namespace bbq {

SpectralField forward_transform(const RealField& f) {
  if (!f.finite())
    throw DataError("forward_transform: input field has non-finite samples");
  const int n = f.grid.n;
  std::vector<Complex> in(f.samples.size());
  for (std::size_t i = 0; i < in.size(); ++i) in[i] = Complex(f.samples[i], 0.0);
  SpectralField out = SpectralField::zeros(f.grid);
  Fft::thread_local_for(n).forward(in, out.coeffs);
  // Exact Hermitian symmetrization. The input is real, so this only removes
  // FFT rounding skew; downstream frequency filters can then isolate weak
  // bands without the parent field's rounding noise looking asymmetric.
  for (int i1 = 0; i1 < n; ++i1) {
    const int m1 = (n - i1) % n;
    for (int i2 = 0; i2 < n; ++i2) {
      const int m2 = (n - i2) % n;
      const std::size_t a = std::size_t(i1) * n + i2;
      const std::size_t b = std::size_t(m1) * n + m2;
      if (a < b) {
        const Complex avg =
            0.5 * (out.coeffs[a] + std::conj(out.coeffs[b]));
        out.coeffs[a] = avg;
        out.coeffs[b] = std::conj(avg);
      } else if (a == b) {
        out.coeffs[a] = Complex(out.coeffs[a].real(), 0.0);
      }
    }
  }
  return out;
}

RealField inverse_transform(const SpectralField& f) {
  const int n = f.grid.n;
  std::vector<Complex> out(f.coeffs.size());
  Fft::thread_local_for(n).backward(f.coeffs, out);
  double max_imag = 0.0;
  double max_real = 0.0;
  RealField r = RealField::zeros(f.grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    max_imag = std::max(max_imag, std::abs(out[i].imag()));
    max_real = std::max(max_real, std::abs(out[i].real()));
    r.samples[i] = out[i].real();
  }
  if (max_imag > 1e-12 * std::max(max_real, 1e-300))
    throw InvariantError(
        "inverse_transform: imaginary residue exceeds 1e-12 relative "
        "(Hermitian symmetry violated)");
  return r;
}

namespace {

// First derivatives use the Nyquist-zeroed wavenumber so odd symbols keep
// Hermitian symmetry; even symbols and norms use the true one.
template <typename F>
void for_each_mode_deriv(const GridSpec& g, F&& fn) {
  const int n = g.n;
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = g.xi(g.deriv_wavenumber(i1));
    for (int i2 = 0; i2 < n; ++i2) {
      const double x2 = g.xi(g.deriv_wavenumber(i2));
      fn(std::size_t(i1) * n + i2, x1, x2);
    }
  }
}

template <typename F>
void for_each_mode(const GridSpec& g, F&& fn) {
  const int n = g.n;
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = g.xi(g.wavenumber(i1));
    for (int i2 = 0; i2 < n; ++i2) {
      const double x2 = g.xi(g.wavenumber(i2));
      fn(std::size_t(i1) * n + i2, x1, x2);
    }
  }
}

}  // namespace

VectorField gradient(const SpectralField& f) {
  VectorField v = VectorField::zeros(f.grid);
  for_each_mode_deriv(f.grid, [&](std::size_t i, double x1, double x2) {
    const Complex c = f.coeffs[i];
    v.x.coeffs[i] = Complex(0.0, 1.0) * x1 * c;
    v.y.coeffs[i] = Complex(0.0, 1.0) * x2 * c;
  });
  return v;
}

VectorField perp_gradient(const SpectralField& f) {
  VectorField v = VectorField::zeros(f.grid);
  for_each_mode_deriv(f.grid, [&](std::size_t i, double x1, double x2) {
    const Complex c = f.coeffs[i];
    v.x.coeffs[i] = Complex(0.0, -1.0) * x2 * c;
    v.y.coeffs[i] = Complex(0.0, 1.0) * x1 * c;
  });
  v.divergence_free = true;
  return v;
}

SpectralField divergence(const VectorField& v) {
  SpectralField d = SpectralField::zeros(v.grid());
  for_each_mode_deriv(v.grid(), [&](std::size_t i, double x1, double x2) {
    d.coeffs[i] =
        Complex(0.0, 1.0) * (x1 * v.x.coeffs[i] + x2 * v.y.coeffs[i]);
  });
  return d;
}

SpectralField curl(const VectorField& v) {
  SpectralField w = SpectralField::zeros(v.grid());
  for_each_mode_deriv(v.grid(), [&](std::size_t i, double x1, double x2) {
    w.coeffs[i] =
        Complex(0.0, 1.0) * (x1 * v.y.coeffs[i] - x2 * v.x.coeffs[i]);
  });
  return w;
}

SpectralField laplacian(const SpectralField& f) {
  SpectralField out = SpectralField::zeros(f.grid);
  for_each_mode(f.grid, [&](std::size_t i, double x1, double x2) {
    out.coeffs[i] = -(x1 * x1 + x2 * x2) * f.coeffs[i];
  });
  return out;
}

SpectralField laplacian_power(const SpectralField& f, double alpha) {
  SpectralField out = SpectralField::zeros(f.grid);
  if (alpha == 0.0) {
    out.coeffs = f.coeffs;
    return out;
  }
  for_each_mode(f.grid, [&](std::size_t i, double x1, double x2) {
    const double m2 = x1 * x1 + x2 * x2;
    out.coeffs[i] = m2 == 0.0 ? Complex{} : std::pow(m2, alpha) * f.coeffs[i];
  });
  return out;
}

VectorField leray_project(const VectorField& v) {
  VectorField p = VectorField::zeros(v.grid());
  const GridSpec& g = v.grid();
  const int n = g.n;
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = g.xi(g.wavenumber(i1));
    for (int i2 = 0; i2 < n; ++i2) {
      const double x2 = g.xi(g.wavenumber(i2));
      const std::size_t i = std::size_t(i1) * n + i2;
      const double m2 = x1 * x1 + x2 * x2;
      const Complex a = v.x.coeffs[i];
      const Complex b = v.y.coeffs[i];
      if (m2 == 0.0) {
        // Mean mode: the projection formula is singular; pass through.
        p.x.coeffs[i] = a;
        p.y.coeffs[i] = b;
      } else {
        const Complex dot = (x1 * a + x2 * b) / m2;
        p.x.coeffs[i] = a - x1 * dot;
        p.y.coeffs[i] = b - x2 * dot;
      }
    }
  }
  p.divergence_free = true;
  return p;
}

namespace {

SpectralField ball_mask(const SpectralField& f, double radius) {
  SpectralField out = f;
  const GridSpec& g = f.grid;
  const int n = g.n;
  // Closed ball; tiny relative slack keeps boundary modes when the radius is
  // meant to land exactly on them.
  const double r2 = radius * radius * (1.0 + 1e-12);
  const double scale = g.two_pi_over_length();
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = scale * g.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const double x2 = scale * g.wavenumber(i2);
      if (x1 * x1 + x2 * x2 > r2)
        out.coeffs[std::size_t(i1) * n + i2] = Complex{};
    }
  }
  return out;
}

}  // namespace

SpectralField fourier_truncate(const SpectralField& f, double cutoff) {
  if (!(cutoff > 0.0)) throw ParameterError("fourier_truncate: cutoff must be > 0");
  return ball_mask(f, cutoff);
}

VectorField fourier_truncate(const VectorField& v, double cutoff) {
  VectorField out{fourier_truncate(v.x, cutoff), fourier_truncate(v.y, cutoff),
                  v.divergence_free};
  return out;
}

SpectralField dealias(const SpectralField& f) {
  return ball_mask(f, f.grid.dealias_radius());
}

namespace {

double lq_from_magnitudes(const GridSpec& g, const std::vector<double>& mag,
                          double q) {
  if (q < 1.0) throw ParameterError("lq_norm: q must be >= 1");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : mag) m = std::max(m, v);
    return m;
  }
  // Scale out the max to avoid overflow for large q.
  double peak = 0.0;
  for (double v : mag) peak = std::max(peak, v);
  if (peak == 0.0) return 0.0;
  double acc = 0.0;
  for (double v : mag) acc += std::pow(v / peak, q);
  return peak * std::pow(acc * g.cell_area(), 1.0 / q);
}

}  // namespace

double lq_norm(const RealField& f, double q) {
  std::vector<double> mag(f.samples.size());
  for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(f.samples[i]);
  return lq_from_magnitudes(f.grid, mag, q);
}

double lq_norm(std::span<const RealField> components, double q) {
  if (components.empty()) throw ParameterError("lq_norm: no components");
  const GridSpec& g = components.front().grid;
  std::vector<double> mag(components.front().samples.size(), 0.0);
  for (const RealField& c : components) {
    require_same_grid(g, c.grid, "lq_norm");
    for (std::size_t i = 0; i < mag.size(); ++i)
      mag[i] += c.samples[i] * c.samples[i];
  }
  for (double& v : mag) v = std::sqrt(v);
  return lq_from_magnitudes(g, mag, q);
}

double hs_norm(const SpectralField& f, double s) {
  double acc = 0.0;
  for_each_mode(f.grid, [&](std::size_t i, double x1, double x2) {
    const double w = std::pow(1.0 + x1 * x1 + x2 * x2, s);
    acc += w * std::norm(f.coeffs[i]);
  });
  return f.grid.domain_length * std::sqrt(acc);
}

double hs_norm(const VectorField& v, double s) {
  const double a = hs_norm(v.x, s);
  const double b = hs_norm(v.y, s);
  return std::sqrt(a * a + b * b);
}

double homogeneous_hs_norm(const SpectralField& f, double s) {
  double acc = 0.0;
  for_each_mode(f.grid, [&](std::size_t i, double x1, double x2) {
    const double m2 = x1 * x1 + x2 * x2;
    if (m2 > 0.0) acc += std::pow(m2, s) * std::norm(f.coeffs[i]);
  });
  return f.grid.domain_length * std::sqrt(acc);
}

double l2_norm(const SpectralField& f) {
  double acc = 0.0;
  for (const Complex& c : f.coeffs) acc += std::norm(c);
  return f.grid.domain_length * std::sqrt(acc);
}

double l2_norm(const VectorField& v) {
  const double a = l2_norm(v.x);
  const double b = l2_norm(v.y);
  return std::sqrt(a * a + b * b);
}

}  // namespace bbq
