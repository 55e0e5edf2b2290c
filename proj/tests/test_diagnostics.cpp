#include "doctest.h"

#include "bbq/diagnostics.hpp"
#include "bbq/spectral_ops.hpp"
#include "test_helpers.hpp"

using namespace bbq;
using namespace bbq::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const GridSpec g64 = GridSpec::make(64);

std::shared_ptr<const DyadicPartition> part64() {
  static const auto p =
      std::make_shared<const DyadicPartition>(build_partition(g64));
  return p;
}

VectorField shear_flow(const GridSpec& g, double a) {
  SpectralField psi = SpectralField::zeros(g);
  const double fac = -0.5 * a / g.two_pi_over_length();
  psi.at_wavenumber(0, 1) = Complex(fac, 0.0);
  psi.at_wavenumber(0, -1) = Complex(fac, 0.0);
  return perp_gradient(psi);
}

struct Fixture {
  ModelParams params;
  ThresholdConfig thresholds;
  RecorderOptions options;
  Trajectory traj;
  SimState init;
};

// One shared small-data trajectory (random band, n=64, T=1).
const Fixture& small_run() {
  static const Fixture fx = [] {
    Fixture f;
    f.params = ModelParams::with_default_cutoff(1.0, 1.0, g64);
    InitSpec spec;
    spec.shape = InitShape::random_band;
    spec.seed = 21;
    spec.band_lo = 1;
    spec.band_hi = 6;
    spec.target_grad_u_besov = 0.05;
    spec.target_grad_theta_besov = 0.01;
    InitReport rep;
    f.init = make_initial_data(spec, g64, *part64(), f.params, &rep);
    f.thresholds =
        ThresholdConfig::derive(f.params, 2.0, rep.achieved_grad_u_besov);
    f.options.q_list = {2.0};
    f.options.s_list = {3.0};
    Recorder recorder(part64(), f.params, f.thresholds, f.options);
    Observers obs;
    obs.record = [&recorder](const SimState& s) { return recorder(s); };
    StepperConfig sc;
    sc.dt = 1e-3;
    sc.t_end = 1.0;
    sc.sample_every = 10;
    f.traj = run(f.init, f.params, sc, obs);
    return f;
  }();
  return fx;
}

}  // namespace

TEST_CASE("threshold derivation follows the smallness formulas") {
  const ModelParams p{0.8, 1.2, 10.0};
  const ThresholdConfig cfg = ThresholdConfig::derive(p, 2.0, 0.06);
  CHECK(cfg.a0 == doctest::Approx(std::min(0.8 / 4.0, 1.2 / 2.0)));
  CHECK(cfg.b0 == doctest::Approx(0.8 / 4.0 * 0.06));
  CHECK_THROWS_AS(ThresholdConfig::derive(p, 0.0, 0.06), ParameterError);
}

TEST_CASE("recorder fills every tracked observable") {
  const Fixture& fx = small_run();
  REQUIRE(!fx.traj.samples.empty());
  const DiagnosticsRecord& r0 = fx.traj.samples.front();
  CHECK(r0.t == 0.0);
  CHECK(r0.l2_u > 0.0);
  CHECK(r0.l2_theta > 0.0);
  CHECK(r0.besov_grad_u == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(r0.besov_grad_theta == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(r0.besov_grad_u_q.size() == 1);
  CHECK(r0.hs_u.size() == 1);
  CHECK(r0.frac_a0 == doctest::Approx(0.05 / fx.thresholds.a0));
  CHECK(r0.finite());
}

TEST_CASE("theta decay residuals") {
  const Fixture& fx = small_run();
  SUBCASE("L2 equality holds to integrator accuracy") {
    const DecayReport rep = theta_decay_check(fx.traj, 2.0, fx.params);
    CHECK(rep.max_rel_residual < 1e-6);
  }
  SUBCASE("zero data gives zero residual") {
    Trajectory traj;
    for (int i = 0; i < 3; ++i) {
      DiagnosticsRecord r;
      r.t = 0.1 * i;
      traj.samples.push_back(r);
    }
    const DecayReport rep = theta_decay_check(traj, 2.0, fx.params);
    CHECK(rep.max_rel_residual == 0.0);
  }
  SUBCASE("unsupported exponent and short trajectories are rejected") {
    CHECK_THROWS_AS(theta_decay_check(fx.traj, 3.0, fx.params),
                    ParameterError);
    Trajectory empty;
    CHECK_THROWS_AS(theta_decay_check(empty, 2.0, fx.params), ParameterError);
  }
}

TEST_CASE("velocity bound checks") {
  SUBCASE("holds along the shared small run") {
    const Fixture& fx = small_run();
    CHECK(velocity_bound_check(fx.traj, fx.params) < 1e-4);
  }
  SUBCASE("pure shear saturates the first term exactly") {
    const ModelParams params = ModelParams::with_default_cutoff(0.7, 1.0, g64);
    SimState init{shear_flow(g64, 0.2), SpectralField::zeros(g64), 0.0};
    RecorderOptions opts;
    Recorder rec(part64(), params, ThresholdConfig::derive(params, 1.0, 0.1),
                 opts);
    Observers obs;
    obs.record = [&rec](const SimState& s) { return rec(s); };
    StepperConfig sc;
    sc.dt = 1e-3;
    sc.t_end = 0.2;
    sc.sample_every = 20;
    const Trajectory traj = run(init, params, sc, obs);
    CHECK(velocity_bound_check(traj, params) < 1e-12);
    // Equality: the measured norm tracks e^{-νt}·l2(u0) to rounding.
    const double expect =
        traj.samples.front().l2_u * std::exp(-params.nu * 0.2);
    CHECK(traj.samples.back().l2_u == doctest::Approx(expect).epsilon(1e-10));
  }
  SUBCASE("buoyancy spin-up from rest stays under theta0 over nu") {
    const ModelParams params = ModelParams::with_default_cutoff(0.5, 1.0, g64);
    SimState init{VectorField::zeros(g64),
                  fourier_truncate(random_field(g64, 71, 1, 6), params.cutoff_N),
                  0.0};
    init.theta *= 0.05;
    init.u.divergence_free = true;
    RecorderOptions opts;
    Recorder rec(part64(), params, ThresholdConfig::derive(params, 1.0, 0.1),
                 opts);
    Observers obs;
    obs.record = [&rec](const SimState& s) { return rec(s); };
    StepperConfig sc;
    sc.dt = 1e-3;
    sc.t_end = 1.0;
    sc.sample_every = 50;
    const Trajectory traj = run(init, params, sc, obs);
    CHECK(velocity_bound_check(traj, params) == 0.0);
    CHECK(traj.samples.back().l2_u <
          traj.samples.front().l2_theta / params.nu);
  }
}

TEST_CASE("threshold monitor") {
  const Fixture& fx = small_run();
  SUBCASE("sub-threshold data never crosses on the short run") {
    const ThresholdReport rep = threshold_monitor(fx.traj, fx.thresholds);
    CHECK(rep.hypotheses_met);
    CHECK(!rep.first_crossing);
    CHECK(rep.max_frac_a0 < 1.0);
    CHECK(rep.max_frac_b0 < 1.0);
  }
  SUBCASE("zero data has identically zero fractions") {
    Trajectory traj;
    for (int i = 0; i < 3; ++i) {
      DiagnosticsRecord r;
      r.t = 0.1 * i;
      traj.samples.push_back(r);
    }
    ThresholdConfig cfg;
    cfg.c0 = 1.0;
    cfg.a0 = 0.5;
    cfg.b0 = 0.0;
    const ThresholdReport rep = threshold_monitor(traj, cfg);
    CHECK(rep.max_frac_a0 == 0.0);
    CHECK(rep.max_frac_b0 == 0.0);
    CHECK(rep.hypotheses_met);  // strict: 0 < a0, 0-fraction b0 counts as met
  }
  SUBCASE("super-threshold data is flagged, crossing recorded") {
    // Same trajectory, tighter thresholds: hypotheses fail at t = 0.
    ThresholdConfig tight = fx.thresholds;
    tight.a0 = fx.traj.samples.front().besov_grad_u / 5.0;
    tight.b0 = fx.traj.samples.front().besov_grad_theta / 5.0;
    const ThresholdReport rep = threshold_monitor(fx.traj, tight);
    CHECK(!rep.hypotheses_met);
    REQUIRE(rep.first_crossing);
    CHECK(*rep.first_crossing == 0.0);
    CHECK(rep.max_frac_a0 >= 5.0 * (1.0 - 1e-12));
  }
}

TEST_CASE("inequality residuals") {
  const Fixture& fx = small_run();
  SUBCASE("velocity inequality holds with a finite implied constant") {
    const ResidualSeries rs =
        inequality_residuals(fx.traj, kInf, fx.thresholds.c0, fx.params,
                             fx.options);
    CHECK(rs.velocity.size() == fx.traj.samples.size());
    CHECK(std::isfinite(rs.max_implied_c0));
    CHECK(rs.max_implied_c0 > 0.0);
    // Residual bookkeeping: slack = rhs - lhs everywhere.
    for (const InequalityResidual& r : rs.velocity)
      CHECK(r.slack == doctest::Approx(r.rhs - r.lhs));
  }
  SUBCASE("recorded finite q works as well") {
    const ResidualSeries rs =
        inequality_residuals(fx.traj, 2.0, fx.thresholds.c0, fx.params,
                             fx.options);
    CHECK(std::isfinite(rs.max_implied_c0));
  }
  SUBCASE("unrecorded q is rejected") {
    CHECK_THROWS_AS(inequality_residuals(fx.traj, 4.0, 1.0, fx.params,
                                         fx.options),
                    ParameterError);
  }
  SUBCASE("exact shear decay gives zero implied constant") {
    const ModelParams params = ModelParams::with_default_cutoff(0.7, 1.0, g64);
    SimState init{shear_flow(g64, 0.2), SpectralField::zeros(g64), 0.0};
    RecorderOptions opts;
    Recorder rec(part64(), params, ThresholdConfig::derive(params, 1.0, 0.1),
                 opts);
    Observers obs;
    obs.record = [&rec](const SimState& s) { return rec(s); };
    StepperConfig sc;
    sc.dt = 1e-3;
    sc.t_end = 0.2;
    sc.sample_every = 20;
    const Trajectory traj = run(init, params, sc, obs);
    const ResidualSeries rs =
        inequality_residuals(traj, kInf, 1.0, params, opts);
    CHECK(rs.max_implied_c0 == 0.0);
  }
  SUBCASE("zero data gives identically zero residuals") {
    Trajectory traj;
    for (int i = 0; i < 5; ++i) {
      DiagnosticsRecord r;
      r.t = 0.1 * i;
      traj.samples.push_back(r);
    }
    const ResidualSeries rs =
        inequality_residuals(traj, kInf, 1.0, small_run().params,
                             RecorderOptions{});
    CHECK(rs.max_implied_c0 == 0.0);
  }
}

TEST_CASE("vortex stretching magnitude") {
  SUBCASE("constant theta gives zero") {
    SpectralField theta = SpectralField::zeros(g64);
    theta.coeffs[0] = Complex(2.0, 0.0);
    SimState s{shear_flow(g64, 0.3), theta, 0.0};
    CHECK(vortex_stretch_magnitude(s) == 0.0);
  }
  SUBCASE("closed form for crossed harmonics") {
    // theta = cos(2πx1/L), u = a sin(2πx2/L) e1:
    // (∇⊥θ·∇)u = (-a k² sin(k x1) cos(k x2), 0), L2 norm = a k² L/2.
    const double a = 0.4;
    const double k = g64.two_pi_over_length();
    SimState s{shear_flow(g64, a), harmonic(g64, 1, 0), 0.0};
    const double expect = a * k * k * g64.domain_length / 2.0;
    CHECK(vortex_stretch_magnitude(s) ==
          doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("pressure recovery") {
  const ModelParams params = ModelParams::with_default_cutoff(0.9, 1.1, g64);
  SUBCASE("zero velocity: closed-form single-harmonic pressure") {
    // -Δp = -∂₂θ with θ = cos(2πx2/L) gives p = -sin(2πx2/L)/k.
    SimState s{VectorField::zeros(g64), harmonic(g64, 0, 1), 0.0};
    const SpectralField p = pressure_recover(s, params);
    const double k = g64.two_pi_over_length();
    const RealField ps = inverse_transform(p);
    double worst = 0.0;
    for (int i2 = 0; i2 < g64.n; ++i2)
      worst = std::max(worst, std::abs(ps.at(7, i2) -
                                       std::sin(k * g64.dx() * i2) / k));
    CHECK(worst < 1e-13);
  }
  SUBCASE("pure shear has zero pressure") {
    SimState s{shear_flow(g64, 0.5), SpectralField::zeros(g64), 0.0};
    CHECK(pressure_recover(s, params).max_abs() < 1e-15);
  }
  SUBCASE("gradient matches the Leray complement of the tendency") {
    SpectralField psi = random_field(g64, 81, 1, 8);
    psi *= 0.1;
    VectorField u = fourier_truncate(perp_gradient(psi), params.cutoff_N);
    u.divergence_free = true;
    SpectralField theta = random_field(g64, 82, 1, 8);
    theta *= 0.1;
    theta = fourier_truncate(theta, params.cutoff_N);
    SimState s{u, theta, 0.0};

    // Unprojected tendency assembled from public pieces.
    const VectorField gu1 = gradient(s.u.x);
    const VectorField gu2 = gradient(s.u.y);
    const RealField u1 = inverse_transform(s.u.x);
    const RealField u2 = inverse_transform(s.u.y);
    auto advect = [&](const VectorField& gf) {
      const RealField a = inverse_transform(gf.x);
      const RealField b = inverse_transform(gf.y);
      RealField prod = RealField::zeros(g64);
      for (std::size_t i = 0; i < prod.samples.size(); ++i)
        prod.samples[i] =
            u1.samples[i] * a.samples[i] + u2.samples[i] * b.samples[i];
      return fourier_truncate(dealias(forward_transform(prod)),
                              params.cutoff_N);
    };
    VectorField tend{advect(gu1), advect(gu2), false};
    tend.x *= -1.0;
    tend.y *= -1.0;
    tend.y += fourier_truncate(s.theta, params.cutoff_N);

    const VectorField proj = leray_project(tend);
    const VectorField grad_p = gradient(pressure_recover(s, params));
    double worst = 0.0;
    for (std::size_t i = 0; i < tend.x.coeffs.size(); ++i) {
      // complement of the projection is exactly +∇p
      worst = std::max(
          worst, std::abs((tend.x.coeffs[i] - proj.x.coeffs[i]) -
                          grad_p.x.coeffs[i]));
      worst = std::max(
          worst, std::abs((tend.y.coeffs[i] - proj.y.coeffs[i]) -
                          grad_p.y.coeffs[i]));
    }
    CHECK(worst < 1e-10 * std::max(tend.max_abs(), 1e-300));
  }
}

TEST_CASE("refinement study contracts in both topologies") {
  const GridSpec g = GridSpec::make(64);
  InitSpec spec;
  spec.shape = InitShape::random_band;
  spec.seed = 4;
  spec.band_lo = 1;
  spec.band_hi = 4;
  spec.target_grad_u_besov = 0.08;
  spec.target_grad_theta_besov = 0.02;
  ModelParams base{1.0, 1.0, 1.0};
  StepperConfig sc;
  sc.dt = 2e-3;
  sc.t_end = 0.5;
  sc.sample_every = 10;
  const std::vector<double> cutoffs = {5.0, 10.0, 20.0};
  const CauchyReport rep =
      cauchy_convergence_study(spec, g, base, sc, cutoffs);
  REQUIRE(rep.consecutive_l2.size() == 2);
  CHECK(rep.consecutive_l2[0] > rep.consecutive_l2[1] * 2.0);
  CHECK(rep.consecutive_hstar[0] > rep.consecutive_hstar[1] * 2.0);
  CHECK(rep.consecutive_l2[1] > 0.0);

  SUBCASE("validation") {
    CHECK_THROWS_AS(
        cauchy_convergence_study(spec, g, base, sc, {5.0, 10.0}),
        ParameterError);
    CHECK_THROWS_AS(
        cauchy_convergence_study(spec, g, base, sc, {10.0, 5.0, 20.0}),
        ParameterError);
    CHECK_THROWS_AS(
        cauchy_convergence_study(spec, g, base, sc, {5.0, 10.0, 100.0}),
        ParameterError);
  }
}

TEST_CASE("uniqueness surrogate") {
  const GridSpec g = GridSpec::make(32);
  const DyadicPartition part = build_partition(g);
  const ModelParams params = ModelParams::with_default_cutoff(0.8, 1.2, g);
  InitSpec spec;
  spec.shape = InitShape::random_band;
  spec.seed = 6;
  spec.band_lo = 1;
  spec.band_hi = 4;
  spec.target_grad_u_besov = 0.1;
  spec.target_grad_theta_besov = 0.05;
  const SimState init = make_initial_data(spec, g, part, params);
  StepperConfig sc;
  sc.dt = 1e-2;
  sc.t_end = 0.3;
  const UniquenessReport rep = uniqueness_check(init, params, sc);
  CHECK(rep.rerun_bit_identical);
  CHECK(rep.halving_ratio > 12.0);
  CHECK(rep.halving_ratio < 20.0);
  CHECK(rep.fitted_k > 0.0);
  // Damped small-data flow: perturbations must not grow faster than a modest
  // exponential on the critical-norm scale.
  CHECK(rep.perturbation_growth_rate < 1.0);
}

TEST_CASE("implied constant is stable under data rescaling") {
  // Both sides of the differential inequalities are evaluated at face value;
  // halving u and quartering theta must leave the implied constant within a
  // factor of two.
  const ModelParams params = ModelParams::with_default_cutoff(1.0, 1.0, g64);
  auto implied_for = [&](double u_target, double th_target) {
    InitSpec spec;
    spec.shape = InitShape::random_band;
    spec.seed = 33;
    spec.band_lo = 1;
    spec.band_hi = 6;
    spec.target_grad_u_besov = u_target;
    spec.target_grad_theta_besov = th_target;
    const SimState init = make_initial_data(spec, g64, *part64(), params);
    RecorderOptions opts;
    Recorder rec(part64(), params, ThresholdConfig::derive(params, 1.0, 0.1),
                 opts);
    Observers obs;
    obs.record = [&rec](const SimState& s) { return rec(s); };
    StepperConfig sc;
    sc.dt = 1e-3;
    sc.t_end = 0.5;
    sc.sample_every = 10;
    const Trajectory traj = run(init, params, sc, obs);
    return inequality_residuals(traj, kInf, 1.0, params, opts).max_implied_c0;
  };
  const double c_base = implied_for(0.08, 0.02);
  const double c_scaled = implied_for(0.04, 0.005);
  CHECK(c_base > 0.0);
  CHECK(c_scaled > 0.0);
  const double ratio = c_base / c_scaled;
  CHECK(ratio >= 0.5);
  CHECK(ratio <= 2.0);
}

TEST_CASE("hs energy tracker") {
  const Fixture& fx = small_run();
  const HsEnergyReport rep =
      hs_energy_tracker(fx.traj, 3.0, fx.params, fx.options);
  CHECK(rep.y.size() == fx.traj.samples.size());
  CHECK(rep.y.front() > 0.0);
  CHECK(rep.monotone_after_transient);
  CHECK(std::isfinite(rep.implied_constant));
  CHECK_THROWS_AS(hs_energy_tracker(fx.traj, 2.5, fx.params, fx.options),
                  ParameterError);
  CHECK_THROWS_AS(hs_energy_tracker(fx.traj, 1.0, fx.params, fx.options),
                  ParameterError);
}
