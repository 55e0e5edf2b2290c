#pragma once

#include <span>

#include "bbq/field.hpp"

namespace bbq {

// Discrete Fourier analysis/synthesis. forward_transform rejects non-finite
// input; inverse_transform rejects fields whose imaginary residue exceeds
// 1e-12 relative (Hermitian symmetry violated).
SpectralField forward_transform(const RealField& f);
RealField inverse_transform(const SpectralField& f);

// Spectral differentiation: multiplication by iξ componentwise. The unpaired
// Nyquist row is treated as zero so outputs stay Hermitian.
VectorField gradient(const SpectralField& f);
// ∇⊥f = (-∂₂f, ∂₁f); output carries the divergence-free certificate.
VectorField perp_gradient(const SpectralField& f);
SpectralField divergence(const VectorField& v);
// ω = ∂₁v₂ - ∂₂v₁.
SpectralField curl(const VectorField& v);
SpectralField laplacian(const SpectralField& f);
// Multiplication by |ξ|^{2α} (fractional Laplacian power).
SpectralField laplacian_power(const SpectralField& f, double alpha);

// Modewise û ↦ û - ξ(ξ·û)/|ξ|²; the k=0 mode passes through unchanged.
VectorField leray_project(const VectorField& v);

// Sharp ball cutoff: zero every coefficient with |ξ| > N.
SpectralField fourier_truncate(const SpectralField& f, double cutoff);
VectorField fourier_truncate(const VectorField& v, double cutoff);

// Radial dealias mask at grid.dealias_radius() (2/3 rule by default).
SpectralField dealias(const SpectralField& f);

// L^q by uniform quadrature with cell area (L/n)²; q = ∞ is the grid max.
// q < 1 raises ParameterError.
double lq_norm(const RealField& f, double q);
// Same, with the pointwise Euclidean magnitude of several components.
double lq_norm(std::span<const RealField> components, double q);

// Inhomogeneous Sobolev norm L·(Σ_k (1+|ξ|²)^s |f̂(k)|²)^{1/2}; the leading L
// makes s = 0 coincide with the L² quadrature norm (Parseval).
double hs_norm(const SpectralField& f, double s);
double hs_norm(const VectorField& v, double s);
// Homogeneous counterpart L·(Σ_{k≠0} |ξ|^{2s} |f̂(k)|²)^{1/2}.
double homogeneous_hs_norm(const SpectralField& f, double s);

// Parseval shortcut for the L² norm, equal to lq_norm(·, 2) up to rounding.
double l2_norm(const SpectralField& f);
double l2_norm(const VectorField& v);

}  // namespace bbq
