#include "bbq/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>

#include "bbq/parallel.hpp"
#include "bbq/spectral_ops.hpp"

namespace bbq {

Recorder::Recorder(std::shared_ptr<const DyadicPartition> partition,
                   ModelParams params, ThresholdConfig thresholds,
                   RecorderOptions options)
    : partition_(std::move(partition)),
      params_(params),
      thresholds_(thresholds),
      options_(std::move(options)) {
  params_.validate();
  for (double q : options_.q_list)
    if (!(q >= 2.0) || std::isinf(q))
      throw ParameterError("Recorder: q_list entries must be finite and >= 2");
  for (double s : options_.s_list)
    if (!(s > 2.0))
      throw ParameterError("Recorder: s_list entries must be > 2");
}

DiagnosticsRecord Recorder::operator()(const SimState& state) const {
  DiagnosticsRecord rec;
  rec.t = state.t;

  const RealField u1 = inverse_transform(state.u.x);
  const RealField u2 = inverse_transform(state.u.y);
  const RealField th = inverse_transform(state.theta);
  const RealField ucomp[2] = {u1, u2};
  const std::span<const RealField> uspan(ucomp, 2);
  constexpr double inf = std::numeric_limits<double>::infinity();
  rec.l2_u = lq_norm(uspan, 2.0);
  rec.l4_u = lq_norm(uspan, 4.0);
  rec.linf_u = lq_norm(uspan, inf);
  rec.l2_theta = lq_norm(th, 2.0);
  rec.l4_theta = lq_norm(th, 4.0);
  rec.linf_theta = lq_norm(th, inf);

  rec.besov_grad_u = grad_besov_norm(state.u, *partition_);
  rec.besov_grad_theta = grad_besov_norm(state.theta, *partition_);
  for (double q : options_.q_list) {
    rec.besov_grad_u_q.push_back(grad_besov_norm(state.u, *partition_, q));
    rec.besov_grad_theta_q.push_back(
        grad_besov_norm(state.theta, *partition_, q));
  }
  for (double s : options_.s_list) {
    rec.hs_u.push_back(hs_norm(state.u, s));
    rec.hs_theta.push_back(hs_norm(state.theta, s));
  }

  rec.vortex_stretch = vortex_stretch_magnitude(state);
  rec.frac_a0 = thresholds_.a0 > 0.0 ? rec.besov_grad_u / thresholds_.a0 : 0.0;
  if (thresholds_.b0 > 0.0)
    rec.frac_b0 = rec.besov_grad_theta / thresholds_.b0;
  else
    rec.frac_b0 = rec.besov_grad_theta > 0.0
                      ? std::numeric_limits<double>::infinity()
                      : 0.0;
  return rec;
}

double vortex_stretch_magnitude(const SimState& state) {
  const VectorField pg = perp_gradient(state.theta);
  const RealField w1 = inverse_transform(pg.x);
  const RealField w2 = inverse_transform(pg.y);

  auto stretch_component = [&](const SpectralField& ui) {
    const VectorField g = gradient(ui);
    const RealField g1 = inverse_transform(g.x);
    const RealField g2 = inverse_transform(g.y);
    RealField s = RealField::zeros(state.grid());
    for (std::size_t i = 0; i < s.samples.size(); ++i)
      s.samples[i] =
          w1.samples[i] * g1.samples[i] + w2.samples[i] * g2.samples[i];
    return dealias(forward_transform(s));
  };
  const double a = l2_norm(stretch_component(state.u.x));
  const double b = l2_norm(stretch_component(state.u.y));
  return std::sqrt(a * a + b * b);
}

SpectralField pressure_recover(const SimState& state,
                               const ModelParams& params) {
  const GridSpec& g = state.grid();
  const VectorField g1 = gradient(state.u.x);  // (∂₁u₁, ∂₂u₁)
  const VectorField g2 = gradient(state.u.y);  // (∂₁u₂, ∂₂u₂)
  const RealField d11 = inverse_transform(g1.x);
  const RealField d21 = inverse_transform(g1.y);
  const RealField d12 = inverse_transform(g2.x);
  const RealField d22 = inverse_transform(g2.y);

  // ∂ₗu_m ∂_m u_ℓ = (∂₁u₁)² + (∂₂u₂)² + 2 ∂₁u₂ ∂₂u₁
  RealField f = RealField::zeros(g);
  for (std::size_t i = 0; i < f.samples.size(); ++i)
    f.samples[i] = d11.samples[i] * d11.samples[i] +
                   d22.samples[i] * d22.samples[i] +
                   2.0 * d12.samples[i] * d21.samples[i];
  SpectralField quad =
      fourier_truncate(dealias(forward_transform(f)), params.cutoff_N);

  const VectorField gt = gradient(fourier_truncate(state.theta, params.cutoff_N));
  SpectralField p = SpectralField::zeros(g);
  const int n = g.n;
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = g.xi(g.wavenumber(i1));
    for (int i2 = 0; i2 < n; ++i2) {
      const double x2 = g.xi(g.wavenumber(i2));
      const double m2 = x1 * x1 + x2 * x2;
      if (m2 == 0.0) continue;  // zero-mean pressure
      const std::size_t i = std::size_t(i1) * n + i2;
      p.coeffs[i] = (quad.coeffs[i] - gt.y.coeffs[i]) / m2;
    }
  }
  return p;
}

namespace {

void require_samples(const Trajectory& traj, std::size_t min_count,
                     const char* where) {
  if (traj.samples.size() < min_count)
    throw ParameterError(std::string(where) + ": trajectory has fewer than " +
                         std::to_string(min_count) + " samples");
}

}  // namespace

DecayReport theta_decay_check(const Trajectory& traj, double q,
                              const ModelParams& params) {
  require_samples(traj, 2, "theta_decay_check");
  DecayReport rep;
  rep.q = q;
  auto column = [&](const DiagnosticsRecord& r) {
    if (q == 2.0) return r.l2_theta;
    if (q == 4.0) return r.l4_theta;
    if (std::isinf(q)) return r.linf_theta;
    throw ParameterError("theta_decay_check: q must be one of {2, 4, inf}");
  };
  const double t0 = traj.samples.front().t;
  const double n0 = column(traj.samples.front());
  double worst = 0.0;
  for (const DiagnosticsRecord& r : traj.samples) {
    const double expect = n0 * std::exp(-params.lambda * (r.t - t0));
    const double dev = q == 2.0 ? std::abs(column(r) - expect)
                                : std::max(0.0, column(r) - expect);
    worst = std::max(worst, n0 > 0.0 ? dev / n0 : column(r));
  }
  rep.max_rel_residual = worst;
  return rep;
}

double velocity_bound_check(const Trajectory& traj, const ModelParams& params) {
  require_samples(traj, 2, "velocity_bound_check");
  const double t0 = traj.samples.front().t;
  const double u0 = traj.samples.front().l2_u;
  const double th0 = traj.samples.front().l2_theta;
  double worst = 0.0;
  for (const DiagnosticsRecord& r : traj.samples) {
    const double bound =
        u0 * std::exp(-params.nu * (r.t - t0)) + th0 / params.nu;
    const double denom = std::max(bound, 1e-300);
    worst = std::max(worst, std::max(0.0, r.l2_u - bound) / denom);
  }
  return worst;
}

ThresholdReport threshold_monitor(const Trajectory& traj,
                                  const ThresholdConfig& cfg) {
  require_samples(traj, 1, "threshold_monitor");
  ThresholdReport rep;
  auto frac = [&](double value, double threshold) {
    if (threshold > 0.0) return value / threshold;
    return value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  const DiagnosticsRecord& first = traj.samples.front();
  rep.hypotheses_met = frac(first.besov_grad_u, cfg.a0) < 1.0 &&
                       frac(first.besov_grad_theta, cfg.b0) < 1.0;
  for (const DiagnosticsRecord& r : traj.samples) {
    const double fa = frac(r.besov_grad_u, cfg.a0);
    const double fb = frac(r.besov_grad_theta, cfg.b0);
    rep.max_frac_a0 = std::max(rep.max_frac_a0, fa);
    rep.max_frac_b0 = std::max(rep.max_frac_b0, fb);
    if (!rep.first_crossing && (fa >= 1.0 || fb >= 1.0)) {
      // The initial sample "crosses" only when the hypotheses already fail.
      if (r.t > first.t || !rep.hypotheses_met) rep.first_crossing = r.t;
    }
  }
  return rep;
}

namespace {

std::size_t q_index(const RecorderOptions& options, double q,
                    const char* where) {
  for (std::size_t i = 0; i < options.q_list.size(); ++i)
    if (options.q_list[i] == q) return i;
  throw ParameterError(std::string(where) +
                       ": q was not recorded (missing from q_list)");
}

std::vector<double> ddt(const std::vector<double>& x, double h) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) / (2 * h);
  d[0] = (x[1] - x[0]) / h;
  d[n - 1] = (x[n - 1] - x[n - 2]) / h;
  return d;
}

}  // namespace

ResidualSeries inequality_residuals(const Trajectory& traj, double q,
                                    double c0, const ModelParams& params,
                                    const RecorderOptions& options) {
  require_samples(traj, 3, "inequality_residuals");
  const std::size_t n = traj.samples.size();
  const double h = traj.samples[1].t - traj.samples[0].t;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(traj.samples[i].t - traj.samples[i - 1].t - h) > 1e-9 * h)
      throw ParameterError("inequality_residuals: nonuniform sampling cadence");

  std::vector<double> xu(n), xt(n), xinf(n);
  if (std::isinf(q)) {
    for (std::size_t i = 0; i < n; ++i) {
      xu[i] = traj.samples[i].besov_grad_u;
      xt[i] = traj.samples[i].besov_grad_theta;
    }
  } else {
    const std::size_t qi = q_index(options, q, "inequality_residuals");
    for (std::size_t i = 0; i < n; ++i) {
      xu[i] = traj.samples[i].besov_grad_u_q[qi];
      xt[i] = traj.samples[i].besov_grad_theta_q[qi];
    }
  }
  for (std::size_t i = 0; i < n; ++i) xinf[i] = traj.samples[i].besov_grad_u;

  const std::vector<double> du = ddt(xu, h);
  const std::vector<double> dt = ddt(xt, h);

  ResidualSeries series;
  series.velocity.resize(n);
  series.temperature.resize(n);
  auto implied = [](double lhs, double denom) {
    if (lhs <= 0.0) return 0.0;
    return denom > 0.0 ? lhs / denom : std::numeric_limits<double>::infinity();
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double t = traj.samples[i].t;
    {
      InequalityResidual& r = series.velocity[i];
      r.t = t;
      r.lhs = du[i] + params.nu * xu[i];
      const double denom = xinf[i] * xu[i] + xt[i];
      r.rhs = c0 * denom;
      r.slack = r.rhs - r.lhs;
      r.implied_c0 = implied(r.lhs, denom);
    }
    {
      InequalityResidual& r = series.temperature[i];
      r.t = t;
      r.lhs = dt[i] + params.lambda * xt[i];
      const double denom = xinf[i] * xt[i];
      r.rhs = c0 * denom;
      r.slack = r.rhs - r.lhs;
      r.implied_c0 = implied(r.lhs, denom);
    }
    // Endpoint estimates are one-sided and carry an O(h) bias that inflates
    // the constant on decaying series; the calibration summary uses the
    // centered interior samples.
    if (i > 0 && i + 1 < n)
      series.max_implied_c0 =
          std::max({series.max_implied_c0, series.velocity[i].implied_c0,
                    series.temperature[i].implied_c0});
  }
  return series;
}

namespace {

double state_l2_distance(const SimState& a, const SimState& b) {
  const double dx = l2_norm(a.u.x - b.u.x);
  const double dy = l2_norm(a.u.y - b.u.y);
  const double dt = l2_norm(a.theta - b.theta);
  return std::sqrt(dx * dx + dy * dy + dt * dt);
}

double state_hstar_distance(const SimState& a, const SimState& b,
                            const DyadicPartition& part, double sigma) {
  const double dx = hstar_norm(a.u.x - b.u.x, part, sigma);
  const double dy = hstar_norm(a.u.y - b.u.y, part, sigma);
  const double dt = hstar_norm(a.theta - b.theta, part, sigma);
  return std::sqrt(dx * dx + dy * dy + dt * dt);
}

}  // namespace

CauchyReport cauchy_convergence_study(const InitSpec& init,
                                      const GridSpec& grid,
                                      const ModelParams& base,
                                      const StepperConfig& config,
                                      const std::vector<double>& cutoffs) {
  if (cutoffs.size() < 3)
    throw ParameterError("cauchy_convergence_study: need >= 3 cutoffs");
  for (std::size_t i = 1; i < cutoffs.size(); ++i)
    if (!(cutoffs[i] > cutoffs[i - 1]))
      throw ParameterError("cauchy_convergence_study: cutoffs must increase");
  if (cutoffs.back() > grid.dealias_radius() * (1.0 + 1e-12))
    throw ParameterError(
        "cauchy_convergence_study: cutoff exceeds the dealias radius");

  const auto partition =
      std::make_shared<const DyadicPartition>(build_partition(grid));
  ModelParams full = base;
  full.cutoff_N = grid.dealias_radius();
  const SimState u0 = make_initial_data(init, grid, *partition, full);

  struct Variant {
    ModelParams params;
    SimState state;
  };
  std::vector<Variant> variants;
  for (double nn : cutoffs) {
    ModelParams p = base;
    p.cutoff_N = nn;
    SimState s{fourier_truncate(u0.u, nn), fourier_truncate(u0.theta, nn), 0.0};
    s.u.divergence_free = true;
    variants.push_back(Variant{p, std::move(s)});
  }

  CauchyReport rep;
  rep.cutoffs = cutoffs;
  rep.consecutive_l2.assign(cutoffs.size() - 1, 0.0);
  rep.consecutive_hstar.assign(cutoffs.size() - 1, 0.0);

  const long long steps = std::llround(config.t_end / config.dt);
  auto measure = [&]() {
    for (std::size_t i = 0; i + 1 < variants.size(); ++i) {
      rep.consecutive_l2[i] =
          std::max(rep.consecutive_l2[i],
                   state_l2_distance(variants[i].state, variants[i + 1].state));
      rep.consecutive_hstar[i] = std::max(
          rep.consecutive_hstar[i],
          state_hstar_distance(variants[i].state, variants[i + 1].state,
                               *partition, 0.5));
    }
  };
  for (long long i = 0; i <= steps; ++i) {
    if (i % config.sample_every == 0) measure();
    if (i == steps) break;
    for (Variant& v : variants) v.state = step(v.state, v.params, config);
  }
  return rep;
}

UniquenessReport uniqueness_check(const SimState& initial,
                                  const ModelParams& params,
                                  const StepperConfig& config) {
  UniquenessReport rep;

  StepperConfig half = config;
  half.dt = config.dt / 2.0;
  StepperConfig quarter = config;
  quarter.dt = config.dt / 4.0;

  SimState a = initial, a2 = initial, b = initial, c = initial;
  SimState pert = initial;
  {
    // One-mode perturbation for the continuous-dependence fit.
    const double eps = 1e-8 * std::max(pert.theta.max_abs(), 1.0);
    pert.theta.at_wavenumber(1, 0) += eps;
    pert.theta.at_wavenumber(-1, 0) += eps;
  }
  SimState pa = initial;

  const double d0 = state_l2_distance(pa, pert);
  double dT = d0;
  const long long steps = std::llround(config.t_end / config.dt);
  for (long long i = 0; i < steps; ++i) {
    a = step(a, params, config);
    a2 = step(a2, params, config);
    b = step(b, params, half);
    b = step(b, params, half);
    c = step(c, params, quarter);
    c = step(c, params, quarter);
    c = step(c, params, quarter);
    c = step(c, params, quarter);
    pa = step(pa, params, config);
    pert = step(pert, params, config);
    rep.disc_coarse = std::max(rep.disc_coarse, state_l2_distance(a, b));
    rep.disc_fine = std::max(rep.disc_fine, state_l2_distance(b, c));
    dT = state_l2_distance(pa, pert);
  }
  rep.rerun_bit_identical =
      std::memcmp(a.u.x.coeffs.data(), a2.u.x.coeffs.data(),
                  a.u.x.coeffs.size() * sizeof(Complex)) == 0 &&
      std::memcmp(a.u.y.coeffs.data(), a2.u.y.coeffs.data(),
                  a.u.y.coeffs.size() * sizeof(Complex)) == 0 &&
      std::memcmp(a.theta.coeffs.data(), a2.theta.coeffs.data(),
                  a.theta.coeffs.size() * sizeof(Complex)) == 0;
  rep.halving_ratio =
      rep.disc_fine > 0.0 ? rep.disc_coarse / rep.disc_fine : 0.0;
  rep.fitted_k = rep.disc_coarse / std::pow(config.dt, 4);
  const double t_end = double(steps) * config.dt;
  rep.perturbation_growth_rate =
      d0 > 0.0 && dT > 0.0 && t_end > 0.0 ? std::log(dT / d0) / t_end : 0.0;
  return rep;
}

HsEnergyReport hs_energy_tracker(const Trajectory& traj, double s,
                                 const ModelParams& params,
                                 const RecorderOptions& options) {
  if (!(s > 2.0)) throw ParameterError("hs_energy_tracker: s must be > 2");
  require_samples(traj, 3, "hs_energy_tracker");
  std::size_t si = options.s_list.size();
  for (std::size_t i = 0; i < options.s_list.size(); ++i)
    if (options.s_list[i] == s) si = i;
  if (si == options.s_list.size())
    throw ParameterError("hs_energy_tracker: s was not recorded");

  HsEnergyReport rep;
  const std::size_t n = traj.samples.size();
  rep.t.resize(n);
  rep.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.t[i] = traj.samples[i].t;
    rep.y[i] = traj.samples[i].hs_u[si] + traj.samples[i].hs_theta[si];
  }
  const double h = rep.t[1] - rep.t[0];
  const std::vector<double> dy = ddt(rep.y, h);
  const double damp = std::min(params.nu, params.lambda);
  for (std::size_t i = 0; i < n; ++i) {
    const double lhs = dy[i] + damp * rep.y[i];
    const double denom = (1.0 + rep.y[i]) * rep.y[i];
    if (lhs > 0.0 && denom > 0.0)
      rep.implied_constant = std::max(rep.implied_constant, lhs / denom);
  }
  rep.monotone_after_transient = true;
  for (std::size_t i = std::max<std::size_t>(1, n / 4); i + 1 < n; ++i)
    if (rep.y[i + 1] > rep.y[i] * (1.0 + 1e-10))
      rep.monotone_after_transient = false;
  return rep;
}

std::vector<BatteryRun> calibration_battery() {
  std::vector<BatteryRun> battery;
  const GridSpec grid = GridSpec::make(128);
  // Pinned truncation radius: band-limited runs integrate the same system on
  // any grid that resolves it, which is what the refinement studies compare.
  const ModelParams params{1.0, 1.0, 40.0};
  StepperConfig stepper;
  stepper.dt = 1e-3;
  stepper.t_end = 2.0;
  stepper.sample_every = 20;  // 0.02 sampling cadence, kept fixed in time
                              // when dt or n change in the refinement studies

  InitSpec tg;
  tg.shape = InitShape::taylor_green;
  tg.target_grad_u_besov = 0.10;
  tg.target_grad_theta_besov = 0.02;
  battery.push_back(BatteryRun{grid, params, stepper, tg});

  InitSpec rb1;
  rb1.shape = InitShape::random_band;
  rb1.seed = 7;
  rb1.band_lo = 1;
  rb1.band_hi = 8;
  rb1.target_grad_u_besov = 0.08;
  rb1.target_grad_theta_besov = 0.015;
  battery.push_back(BatteryRun{grid, params, stepper, rb1});

  InitSpec rb2;
  rb2.shape = InitShape::random_band;
  rb2.seed = 8;
  rb2.band_lo = 2;
  rb2.band_hi = 12;
  rb2.target_grad_u_besov = 0.12;
  rb2.target_grad_theta_besov = 0.01;
  battery.push_back(BatteryRun{grid, params, stepper, rb2});
  return battery;
}

double run_battery_c0(const std::vector<BatteryRun>& battery, int threads) {
  std::vector<double> worst(battery.size(), 0.0);
  parallel_for_jobs(int(battery.size()), threads, [&](int i) {
    const BatteryRun& br = battery[std::size_t(i)];
    const auto partition =
        std::make_shared<const DyadicPartition>(build_partition(br.grid));
    const SimState init =
        make_initial_data(br.init, br.grid, *partition, br.params);
    RecorderOptions opts;
    opts.q_list = {2.0};
    const ThresholdConfig dummy = ThresholdConfig::derive(
        br.params, 1.0, std::max(br.init.target_grad_u_besov, 1e-6));
    Recorder recorder(partition, br.params, dummy, opts);
    Observers obs;
    obs.record = [&recorder](const SimState& s) { return recorder(s); };
    const Trajectory traj = run(init, br.params, br.stepper, obs);
    if (traj.blow_up)
      throw Error("calibration battery run blew up: " + traj.blow_up->reason);
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (double q : {inf, 2.0}) {
      const ResidualSeries r =
          inequality_residuals(traj, q, 1.0, br.params, opts);
      worst[std::size_t(i)] = std::max(worst[std::size_t(i)], r.max_implied_c0);
    }
  });
  double c0 = 0.0;
  for (double w : worst) c0 = std::max(c0, w);
  return c0;
}

double calibrate_c0(int threads) {
  static std::once_flag flag;
  static double cached = 0.0;
  std::call_once(flag, [&]() { cached = run_battery_c0(calibration_battery(), threads); });
  return cached;
}

}  // namespace bbq
