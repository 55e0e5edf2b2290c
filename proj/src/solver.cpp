#include "bbq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bbq/rng.hpp"
#include "bbq/snapshot.hpp"
#include "bbq/spectral_ops.hpp"

namespace bbq {

namespace {

struct Tendency {
  VectorField du;
  SpectralField dtheta;
};

SpectralField advection_term(const RealField& u1, const RealField& u2,
                             const SpectralField& f, double cutoff) {
  const VectorField grad = gradient(f);
  const RealField g1 = inverse_transform(grad.x);
  const RealField g2 = inverse_transform(grad.y);
  RealField adv = RealField::zeros(f.grid);
  for (std::size_t i = 0; i < adv.samples.size(); ++i)
    adv.samples[i] =
        u1.samples[i] * g1.samples[i] + u2.samples[i] * g2.samples[i];
  return fourier_truncate(dealias(forward_transform(adv)), cutoff);
}

// Nonlinear + buoyancy block: (-PJ_N(u·∇u) + PJ_N(θe₂), -J_N(u·∇θ)).
Tendency nonlinear_tendency(const SimState& state, const ModelParams& params,
                            bool advection, double* max_speed = nullptr) {
  const GridSpec& g = state.grid();
  const double cutoff = params.cutoff_N;

  const RealField u1 = inverse_transform(state.u.x);
  const RealField u2 = inverse_transform(state.u.y);
  if (max_speed) {
    double m = 0.0;
    for (std::size_t i = 0; i < u1.samples.size(); ++i)
      m = std::max(m, std::hypot(u1.samples[i], u2.samples[i]));
    *max_speed = m;
  }

  VectorField mom = VectorField::zeros(g);
  SpectralField dtheta = SpectralField::zeros(g);
  if (advection) {
    mom.x = advection_term(u1, u2, state.u.x, cutoff);
    mom.y = advection_term(u1, u2, state.u.y, cutoff);
    mom.x *= -1.0;
    mom.y *= -1.0;
    dtheta = advection_term(u1, u2, state.theta, cutoff);
    dtheta *= -1.0;
  }
  mom.y += fourier_truncate(state.theta, cutoff);
  return Tendency{leray_project(mom), std::move(dtheta)};
}

// out = (eu·y_u + cu·t_u, et·y_θ + ct·t_θ) at the given time.
SimState combine(const SimState& y, double eu, double et, double cu, double ct,
                 const Tendency& t, double new_time) {
  SimState out = y;
  out.t = new_time;
  const std::size_t count = y.theta.coeffs.size();
  for (std::size_t i = 0; i < count; ++i) {
    out.u.x.coeffs[i] = eu * y.u.x.coeffs[i] + cu * t.du.x.coeffs[i];
    out.u.y.coeffs[i] = eu * y.u.y.coeffs[i] + cu * t.du.y.coeffs[i];
    out.theta.coeffs[i] = et * y.theta.coeffs[i] + ct * t.dtheta.coeffs[i];
  }
  out.u.divergence_free = true;
  return out;
}

}  // namespace

std::pair<VectorField, SpectralField> rhs_nonlinear(const SimState& state,
                                                    const ModelParams& params,
                                                    double* max_speed) {
  params.validate();
  Tendency t = nonlinear_tendency(state, params, true, max_speed);
  return {std::move(t.du), std::move(t.dtheta)};
}

std::pair<VectorField, SpectralField> rhs(const SimState& state,
                                          const ModelParams& params) {
  auto [du, dtheta] = rhs_nonlinear(state, params);
  for (std::size_t i = 0; i < du.x.coeffs.size(); ++i) {
    du.x.coeffs[i] -= params.nu * state.u.x.coeffs[i];
    du.y.coeffs[i] -= params.nu * state.u.y.coeffs[i];
    dtheta.coeffs[i] -= params.lambda * state.theta.coeffs[i];
  }
  return {std::move(du), std::move(dtheta)};
}

SimState step(const SimState& state, const ModelParams& params,
              const StepperConfig& config, bool* cfl_warning) {
  params.validate();
  config.validate();
  const double dt = config.dt;
  const bool adv = config.include_advection;
  const double eu = std::exp(-params.nu * dt * 0.5);
  const double et = std::exp(-params.lambda * dt * 0.5);
  const double eu2 = eu * eu;
  const double et2 = et * et;
  const double dt2 = 0.5 * dt;
  const double th = state.t + dt2;
  const double tf = state.t + dt;

  double max_speed = 0.0;
  const Tendency a = nonlinear_tendency(state, params, adv, &max_speed);

  if (max_speed > 0.0) {
    const double dt_cfl = config.cfl_safety * state.grid().dx() / max_speed;
    if (dt > 2.0 * dt_cfl)
      throw StabilityError("step: advective CFL bound exceeded 2x at t = " +
                               std::to_string(state.t),
                           state.t);
    if (dt > dt_cfl && cfl_warning) *cfl_warning = true;
  }

  // Classical RK4 in the integrating-factor variables; the damping factors
  // are exact, so with a vanishing nonlinear block the step is e^{-ν dt},
  // e^{-λ dt} to rounding.
  const SimState ya = combine(state, eu, et, dt2 * eu, dt2 * et, a, th);
  const Tendency b = nonlinear_tendency(ya, params, adv);
  const SimState yb = combine(state, eu, et, dt2, dt2, b, th);
  const Tendency c = nonlinear_tendency(yb, params, adv);
  const SimState yc = combine(state, eu2, et2, dt * eu, dt * et, c, tf);
  const Tendency d = nonlinear_tendency(yc, params, adv);

  SimState out = state;
  out.t = tf;
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < out.theta.coeffs.size(); ++i) {
    out.u.x.coeffs[i] =
        eu2 * state.u.x.coeffs[i] +
        w * (eu2 * a.du.x.coeffs[i] +
             2.0 * eu * (b.du.x.coeffs[i] + c.du.x.coeffs[i]) +
             d.du.x.coeffs[i]);
    out.u.y.coeffs[i] =
        eu2 * state.u.y.coeffs[i] +
        w * (eu2 * a.du.y.coeffs[i] +
             2.0 * eu * (b.du.y.coeffs[i] + c.du.y.coeffs[i]) +
             d.du.y.coeffs[i]);
    out.theta.coeffs[i] =
        et2 * state.theta.coeffs[i] +
        w * (et2 * a.dtheta.coeffs[i] +
             2.0 * et * (b.dtheta.coeffs[i] + c.dtheta.coeffs[i]) +
             d.dtheta.coeffs[i]);
  }
  out.u.divergence_free = true;

  if (!out.finite())
    throw BlowUpError("step: fields lost finiteness", state.t);
  return out;
}

Trajectory run(const SimState& initial, const ModelParams& params,
               const StepperConfig& config, const Observers& observers) {
  params.validate();
  config.validate();
  Trajectory traj;
  SimState state = initial;
  const long long steps = std::llround(config.t_end / config.dt);

  auto sample = [&](const SimState& s) -> bool {
    if (observers.record) {
      DiagnosticsRecord rec = observers.record(s);
      if (!rec.finite()) {
        traj.blow_up = BlowUpInfo{s.t, "diagnostics lost finiteness"};
        return false;
      }
      // Structured blow-up detection: the critical norm running away.
      if (rec.besov_grad_u > 1e6) {
        traj.samples.push_back(rec);
        traj.blow_up = BlowUpInfo{s.t, "critical Besov norm exceeded 1e6"};
        return false;
      }
      traj.samples.push_back(std::move(rec));
    }
    if (observers.on_sample) observers.on_sample(s);
    if (observers.keep_snapshots) traj.snapshots.push_back(s);
    return true;
  };

  for (long long i = 0; i <= steps; ++i) {
    if (i % config.sample_every == 0) {
      if (!sample(state)) {
        traj.final_state = std::move(state);
        return traj;
      }
    }
    if (i == steps) break;
    try {
      bool warn = false;
      state = step(state, params, config, &warn);
      if (warn) ++traj.cfl_warnings;
    } catch (const BlowUpError& e) {
      traj.blow_up = BlowUpInfo{e.last_valid_time(), e.what()};
      break;
    } catch (const StabilityError& e) {
      traj.blow_up = BlowUpInfo{e.last_valid_time(), e.what()};
      break;
    }
  }
  traj.final_state = std::move(state);
  return traj;
}

VectorField biot_savart(const SpectralField& omega) {
  const double scale = std::max(omega.max_abs(), 1e-300);
  if (std::abs(omega.mean()) > 1e-12 * scale)
    throw ParameterError("biot_savart: omega must be mean zero");

  const GridSpec& g = omega.grid;
  const int n = g.n;
  VectorField u = VectorField::zeros(g);
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = g.xi(g.deriv_wavenumber(i1));
    for (int i2 = 0; i2 < n; ++i2) {
      const double x2 = g.xi(g.deriv_wavenumber(i2));
      const double m2 = x1 * x1 + x2 * x2;
      if (m2 == 0.0) continue;
      const std::size_t i = std::size_t(i1) * n + i2;
      // u = ∇⊥ψ with Δψ = ω.
      const Complex psi = -omega.coeffs[i] / m2;
      u.x.coeffs[i] = Complex(0.0, -1.0) * x2 * psi;
      u.y.coeffs[i] = Complex(0.0, 1.0) * x1 * psi;
    }
  }
  u.divergence_free = true;
  return u;
}

std::pair<SpectralField, SpectralField> vorticity_rhs(
    const SpectralField& omega, const SpectralField& theta,
    const ModelParams& params) {
  params.validate();
  require_same_grid(omega.grid, theta.grid, "vorticity_rhs");
  const VectorField u = biot_savart(omega);  // checks the mean-zero precondition
  const RealField u1 = inverse_transform(u.x);
  const RealField u2 = inverse_transform(u.y);

  SpectralField domega = advection_term(u1, u2, omega, params.cutoff_N);
  domega *= -1.0;
  const VectorField gt = gradient(theta);
  for (std::size_t i = 0; i < domega.coeffs.size(); ++i)
    domega.coeffs[i] += gt.x.coeffs[i] - params.nu * omega.coeffs[i];

  SpectralField dtheta = advection_term(u1, u2, theta, params.cutoff_N);
  dtheta *= -1.0;
  for (std::size_t i = 0; i < dtheta.coeffs.size(); ++i)
    dtheta.coeffs[i] -= params.lambda * theta.coeffs[i];
  return {std::move(domega), std::move(dtheta)};
}

namespace {

// Nonlinear block of the vorticity form: (-J_N(u·∇ω) + ∂₁θ, -J_N(u·∇θ)).
std::pair<SpectralField, SpectralField> vorticity_nonlinear(
    const SpectralField& omega, const SpectralField& theta,
    const ModelParams& params) {
  const VectorField u = biot_savart(omega);
  const RealField u1 = inverse_transform(u.x);
  const RealField u2 = inverse_transform(u.y);
  SpectralField domega = advection_term(u1, u2, omega, params.cutoff_N);
  domega *= -1.0;
  const VectorField gt = gradient(theta);
  for (std::size_t i = 0; i < domega.coeffs.size(); ++i)
    domega.coeffs[i] += gt.x.coeffs[i];
  SpectralField dtheta = advection_term(u1, u2, theta, params.cutoff_N);
  dtheta *= -1.0;
  return {std::move(domega), std::move(dtheta)};
}

}  // namespace

std::pair<SpectralField, SpectralField> vorticity_step(
    const SpectralField& omega, const SpectralField& theta,
    const ModelParams& params, const StepperConfig& config) {
  const double dt = config.dt;
  const double eu = std::exp(-params.nu * dt * 0.5);
  const double et = std::exp(-params.lambda * dt * 0.5);
  const double dt2 = 0.5 * dt;

  auto lin = [&](const SpectralField& f, double e, double c,
                 const SpectralField& t) {
    SpectralField out = f;
    for (std::size_t i = 0; i < out.coeffs.size(); ++i)
      out.coeffs[i] = e * f.coeffs[i] + c * t.coeffs[i];
    return out;
  };

  const auto a = vorticity_nonlinear(omega, theta, params);
  const auto b = vorticity_nonlinear(lin(omega, eu, dt2 * eu, a.first),
                                     lin(theta, et, dt2 * et, a.second), params);
  const auto c = vorticity_nonlinear(lin(omega, eu, dt2, b.first),
                                     lin(theta, et, dt2, b.second), params);
  const auto d = vorticity_nonlinear(lin(omega, eu * eu, dt * eu, c.first),
                                     lin(theta, et * et, dt * et, c.second),
                                     params);

  SpectralField out_w = omega;
  SpectralField out_t = theta;
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < out_w.coeffs.size(); ++i) {
    out_w.coeffs[i] =
        eu * eu * omega.coeffs[i] +
        w * (eu * eu * a.first.coeffs[i] +
             2.0 * eu * (b.first.coeffs[i] + c.first.coeffs[i]) +
             d.first.coeffs[i]);
    out_t.coeffs[i] =
        et * et * theta.coeffs[i] +
        w * (et * et * a.second.coeffs[i] +
             2.0 * et * (b.second.coeffs[i] + c.second.coeffs[i]) +
             d.second.coeffs[i]);
  }
  return {std::move(out_w), std::move(out_t)};
}

namespace {

SpectralField random_band_field(const GridSpec& g, std::uint64_t seed,
                                int band_lo, int band_hi) {
  SpectralField f = SpectralField::zeros(g);
  for (int k1 = -band_hi; k1 <= band_hi; ++k1) {
    for (int k2 = -band_hi; k2 <= band_hi; ++k2) {
      // Fill one representative per conjugate pair, mirror the other.
      if (k1 < 0 || (k1 == 0 && k2 <= 0)) continue;
      const double kk = std::sqrt(double(k1) * k1 + double(k2) * k2);
      if (kk < band_lo || kk > band_hi) continue;
      if (std::abs(k1) >= g.n / 2 || std::abs(k2) >= g.n / 2) continue;
      std::uint64_t s = mode_stream(seed, k1, k2);
      const double amp = uniform01(s) / (kk * kk);  // smooth band spectrum
      const double phase = 2.0 * std::numbers::pi * uniform01(s);
      const Complex c = amp * Complex(std::cos(phase), std::sin(phase));
      f.at_wavenumber(k1, k2) = c;
      f.at_wavenumber(-k1, -k2) = std::conj(c);
    }
  }
  return f;
}

}  // namespace

double grad_besov_norm(const VectorField& u, const DyadicPartition& part,
                       double p) {
  const VectorField g1 = gradient(u.x);
  const VectorField g2 = gradient(u.y);
  const SpectralField comps[4] = {g1.x, g1.y, g2.x, g2.y};
  const BesovParams b{0.0, p, 1.0, true};
  return besov_norm(std::span<const SpectralField>(comps, 4), part, b);
}

double grad_besov_norm(const SpectralField& f, const DyadicPartition& part,
                       double p) {
  const VectorField g = gradient(f);
  const SpectralField comps[2] = {g.x, g.y};
  const BesovParams b{0.0, p, 1.0, true};
  return besov_norm(std::span<const SpectralField>(comps, 2), part, b);
}

SimState make_initial_data(const InitSpec& spec, const GridSpec& grid,
                           const DyadicPartition& partition,
                           const ModelParams& params, InitReport* report) {
  grid.validate();
  params.validate();
  if (spec.target_grad_u_besov < 0.0 || spec.target_grad_theta_besov < 0.0)
    throw ParameterError("make_initial_data: targets must be >= 0");

  VectorField u = VectorField::zeros(grid);
  SpectralField theta = SpectralField::zeros(grid);

  switch (spec.shape) {
    case InitShape::taylor_green: {
      // u = ∇⊥ψ with the Taylor-Green streamfunction; θ a matched cell shape.
      const double k = grid.two_pi_over_length();
      RealField psi = RealField::zeros(grid);
      RealField th = RealField::zeros(grid);
      const double h = grid.dx();
      for (int i1 = 0; i1 < grid.n; ++i1)
        for (int i2 = 0; i2 < grid.n; ++i2) {
          psi.at(i1, i2) = std::sin(k * h * i1) * std::sin(k * h * i2);
          th.at(i1, i2) = std::cos(k * h * i1) * std::cos(k * h * i2);
        }
      u = perp_gradient(forward_transform(psi));
      theta = forward_transform(th);
      break;
    }
    case InitShape::random_band: {
      const SpectralField psi =
          random_band_field(grid, spec.seed * 2 + 1, spec.band_lo, spec.band_hi);
      u = perp_gradient(psi);
      theta = random_band_field(grid, spec.seed * 2 + 2, spec.band_lo, spec.band_hi);
      break;
    }
    case InitShape::file: {
      auto load = [&](const std::string& path) {
        Snapshot s = read_snapshot(path);
        SpectralField f = std::holds_alternative<RealField>(s)
                              ? forward_transform(std::get<RealField>(s))
                              : std::get<SpectralField>(s);
        require_same_grid(f.grid, grid, "make_initial_data(file)");
        return f;
      };
      VectorField raw{load(spec.file_u1), load(spec.file_u2), false};
      u = leray_project(raw);
      theta = load(spec.file_theta);
      break;
    }
  }

  u = fourier_truncate(u, params.cutoff_N);
  theta = fourier_truncate(theta, params.cutoff_N);

  auto rescale_u = [&](double target) {
    const double have = grad_besov_norm(u, partition);
    if (target == 0.0) {
      u = VectorField::zeros(grid);
      u.divergence_free = true;
      return;
    }
    if (have == 0.0)
      throw ParameterError(
          "make_initial_data: zero-shape velocity with nonzero target");
    const double a = target / have;
    u.x *= a;
    u.y *= a;
  };
  auto rescale_theta = [&](double target) {
    const double have = grad_besov_norm(theta, partition);
    if (target == 0.0) {
      theta = SpectralField::zeros(grid);
      return;
    }
    if (have == 0.0)
      throw ParameterError(
          "make_initial_data: zero-shape temperature with nonzero target");
    theta *= target / have;
  };
  rescale_u(spec.target_grad_u_besov);
  rescale_theta(spec.target_grad_theta_besov);

  if (report) {
    report->achieved_grad_u_besov = grad_besov_norm(u, partition);
    report->achieved_grad_theta_besov = grad_besov_norm(theta, partition);
  }
  SimState state{std::move(u), std::move(theta), 0.0};
  state.u.divergence_free = true;
  return state;
}

}  // namespace bbq
