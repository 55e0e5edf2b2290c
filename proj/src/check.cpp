#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "bbq/commands.hpp"
#include "bbq/diagnostics.hpp"
#include "bbq/rng.hpp"
#include "bbq/spectral_ops.hpp"
#include "bbq/summary.hpp"

namespace bbq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Full-spectrum random field (Hermitian, mean zero, Nyquist rows clear).
SpectralField random_field(const GridSpec& g, std::uint64_t seed,
                           int k_lo = 1, int k_hi = 0) {
  if (k_hi == 0) k_hi = g.n / 2 - 1;
  SpectralField f = SpectralField::zeros(g);
  std::uint64_t s = seed;
  for (int k1 = -k_hi; k1 <= k_hi; ++k1)
    for (int k2 = -k_hi; k2 <= k_hi; ++k2) {
      if (k1 < 0 || (k1 == 0 && k2 <= 0)) continue;
      const double kk = std::sqrt(double(k1) * k1 + double(k2) * k2);
      if (kk < k_lo || kk > k_hi) continue;
      std::uint64_t ms = mode_stream(s, k1, k2);
      const Complex c(uniform_pm1(ms), uniform_pm1(ms));
      f.at_wavenumber(k1, k2) = c;
      f.at_wavenumber(-k1, -k2) = std::conj(c);
    }
  return f;
}

void run_suite(struct Suite& suite, std::uint64_t seed, bool corrupt_partition);

struct Suite {
  int failures = 0;
  void check(const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %-34s %s\n", ok ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    if (!ok) ++failures;
  }
};

}  // namespace

int cmd_check(std::uint64_t seed, bool corrupt_partition) {
  Suite suite;
  try {
    run_suite(suite, seed, corrupt_partition);
  } catch (const std::exception& e) {
    suite.check("suite_completed", false, e.what());
  }
  std::printf("%s: %d failure(s)\n", suite.failures == 0 ? "OK" : "FAILED",
              suite.failures);
  return suite.failures == 0 ? 0 : 1;
}

namespace {

void run_suite(Suite& suite, std::uint64_t seed, bool corrupt_partition) {
  const GridSpec g64 = GridSpec::make(64);
  const GridSpec g128 = GridSpec::make(128);
  DyadicPartition part64 = build_partition(g64);
  DyadicPartition part128 = build_partition(g128);
  if (corrupt_partition) {
    // Fault-injection hook: damage the tabulated profile at one wavenumber
    // pair (and its conjugate mirror, keeping blocks real-valued).
    auto& block = part128.phi_hat[part128.phi_hat.size() / 2];
    const int n = g128.n;
    const int i1 = 3, i2 = 5;
    block[std::size_t(i1) * n + i2] += 1e-3;
    block[std::size_t((n - i1) % n) * n + (n - i2) % n] += 1e-3;
  }

  {  // transform roundtrip
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const SpectralField f = random_field(g64, seed + trial);
      const RealField r = inverse_transform(f);
      const SpectralField f2 = forward_transform(r);
      double err = 0.0;
      for (std::size_t i = 0; i < f.coeffs.size(); ++i)
        err = std::max(err, std::abs(f.coeffs[i] - f2.coeffs[i]));
      worst = std::max(worst, err / std::max(f.max_abs(), 1e-300));
    }
    suite.check("transform_roundtrip", worst < 1e-12,
                "max rel err " + format_double(worst));
  }

  {  // single harmonic analysis
    RealField r = RealField::zeros(g64);
    for (int i1 = 0; i1 < g64.n; ++i1)
      for (int i2 = 0; i2 < g64.n; ++i2)
        r.at(i1, i2) = std::cos(g64.two_pi_over_length() * g64.dx() * i1);
    const SpectralField f = forward_transform(r);
    double err = std::abs(f.at_wavenumber(1, 0) - Complex(0.5, 0.0)) +
                 std::abs(f.at_wavenumber(-1, 0) - Complex(0.5, 0.0));
    SpectralField rest = f;
    rest.at_wavenumber(1, 0) = 0.0;
    rest.at_wavenumber(-1, 0) = 0.0;
    err += rest.max_abs();
    suite.check("single_harmonic_transform", err < 1e-13,
                "residual " + format_double(err));
  }

  for (const auto* pp : {&part64, &part128}) {
    const DyadicPartition& part = *pp;
    double worst = 0.0;
    const int n = part.grid.n;
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2) {
        const std::size_t i = std::size_t(i1) * n + i2;
        if (i == 0) continue;
        double sum = 0.0;
        for (int j = part.j_min; j <= part.j_max; ++j) sum += part.phi(j)[i];
        worst = std::max(worst, std::abs(1.0 - sum));
      }
    suite.check("partition_of_unity_n" + std::to_string(n), worst < 1e-12,
                "max residue " + format_double(worst));
  }

  {  // self-similar profile: phi_{j+1}(2xi) == phi_j(xi) bitwise
    bool ok = true;
    const int n = g128.n;
    for (int j = part128.j_min; j < part128.j_max && ok; ++j)
      for (int k1 = 0; k1 <= n / 4 && ok; ++k1)
        for (int k2 = 1; k2 <= n / 4; ++k2) {
          const std::size_t lo = std::size_t(g128.index_of(k1)) * n + g128.index_of(k2);
          const std::size_t hi =
              std::size_t(g128.index_of(2 * k1)) * n + g128.index_of(2 * k2);
          if (part128.phi(j)[lo] != part128.phi(j + 1)[hi]) {
            ok = false;
            break;
          }
        }
    suite.check("partition_self_similar", ok, ok ? "bitwise equal" : "mismatch");
  }

  {  // homogeneous + inhomogeneous reconstruction
    double worst_h = 0.0, worst_i = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const SpectralField f = random_field(g128, seed + 300 + trial);
      SpectralField sum_h = SpectralField::zeros(g128);
      for (int j = part128.j_min; j <= part128.j_max; ++j)
        sum_h += dyadic_block(f, part128, j, true);
      SpectralField sum_i = dyadic_block(f, part128, -1, false);
      for (int j = 0; j <= part128.j_max; ++j)
        sum_i += dyadic_block(f, part128, j, false);
      SpectralField target_h = f;
      target_h.coeffs[0] = 0.0;
      double eh = 0.0, ei = 0.0;
      for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
        eh = std::max(eh, std::abs(sum_h.coeffs[i] - target_h.coeffs[i]));
        ei = std::max(ei, std::abs(sum_i.coeffs[i] - f.coeffs[i]));
      }
      const double scale = std::max(f.max_abs(), 1e-300);
      worst_h = std::max(worst_h, eh / scale);
      worst_i = std::max(worst_i, ei / scale);
    }
    suite.check("homogeneous_reconstruction", worst_h < 1e-12,
                "max rel err " + format_double(worst_h));
    suite.check("inhomogeneous_reconstruction", worst_i < 1e-12,
                "max rel err " + format_double(worst_i));
  }

  {  // almost-orthogonality: disjoint annuli for |j-k| >= 2
    double worst = 0.0;
    for (int j = part128.j_min; j <= part128.j_max; ++j)
      for (int k = j + 2; k <= part128.j_max; ++k)
        for (std::size_t i = 0; i < part128.phi(j).size(); ++i)
          worst = std::max(worst, part128.phi(j)[i] * part128.phi(k)[i]);
    suite.check("block_orthogonality", worst == 0.0,
                "max overlap " + format_double(worst));
  }

  {  // sharp cutoff: contraction and O(1/N) approximation
    int violations = 0;
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const SpectralField f = random_field(g128, seed + 500 + trial);
      for (double s : {0.0, 1.0, 2.0}) {
        const double full = hs_norm(f, s);
        for (double frac : {0.125, 0.25, 0.5}) {
          const double nn = frac * g128.nyquist();
          const SpectralField jf = fourier_truncate(f, nn);
          if (hs_norm(jf, s) > full * (1.0 + 1e-14)) ++violations;
          if (s == 2.0) {
            const double err = hs_norm(jf - f, s - 1.0);
            worst_ratio = std::max(worst_ratio, err * nn / full);
          }
        }
      }
    }
    suite.check("truncate_contraction", violations == 0,
                std::to_string(violations) + " violations");
    suite.check("truncate_approximation", worst_ratio <= 1.0,
                "max N*err/norm " + format_double(worst_ratio));
  }

  {  // Leray projection properties
    double worst_idem = 0.0, worst_grad = 0.0, worst_div = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      VectorField v{random_field(g64, seed + 700 + trial),
                    random_field(g64, seed + 800 + trial), false};
      const VectorField pv = leray_project(v);
      const VectorField ppv = leray_project(pv);
      double idem = 0.0;
      for (std::size_t i = 0; i < pv.x.coeffs.size(); ++i)
        idem = std::max({idem, std::abs(ppv.x.coeffs[i] - pv.x.coeffs[i]),
                         std::abs(ppv.y.coeffs[i] - pv.y.coeffs[i])});
      worst_idem = std::max(worst_idem, idem / std::max(v.max_abs(), 1e-300));
      worst_div = std::max(worst_div, divergence_certificate_error(pv));
      const VectorField gf = gradient(random_field(g64, seed + 900 + trial));
      const VectorField pg = leray_project(gf);
      worst_grad = std::max(
          worst_grad, pg.max_abs() / std::max(gf.max_abs(), 1e-300));
    }
    suite.check("leray_idempotent", worst_idem < 1e-12,
                "max rel err " + format_double(worst_idem));
    suite.check("leray_kills_gradients", worst_grad < 1e-12,
                "max rel residue " + format_double(worst_grad));
    suite.check("leray_divergence_free", worst_div < 1e-12,
                "max certificate err " + format_double(worst_div));
  }

  {  // Bernstein sweep
    double lo = kInf, hi = 0.0;
    const SpectralField f = random_field(g128, seed + 1000);
    for (int j : part128.resolved_blocks()) {
      for (double alpha : {0.0, 0.5, 1.0})
        for (auto [p, q] : std::vector<std::pair<double, double>>{
                 {2.0, 2.0}, {2.0, kInf}, {kInf, kInf}}) {
          const BernsteinReport rep = bernstein_check(f, part128, j, alpha, p, q);
          if (rep.lhs == 0.0) continue;
          hi = std::max(hi, rep.upper_constant);
          lo = std::min(lo, rep.lower_constant);
        }
    }
    suite.check("bernstein_constants", lo >= 0.25 && hi <= 4.0,
                "lower " + format_double(lo) + ", upper " + format_double(hi));
  }

  {  // paraproduct reconstruction
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const SpectralField f = random_field(g64, seed + 1100 + trial);
      const SpectralField gg = random_field(g64, seed + 1200 + trial);
      const ParaproductSplit split = paraproduct_split(f, gg, part64);
      RealField prod = inverse_transform(f);
      const RealField gphys = inverse_transform(gg);
      for (std::size_t i = 0; i < prod.samples.size(); ++i)
        prod.samples[i] *= gphys.samples[i];
      const SpectralField ref = dealias(forward_transform(prod));
      SpectralField sum = split.low_high;
      sum += split.high_low;
      sum += split.high_high;
      double err = 0.0;
      for (std::size_t i = 0; i < sum.coeffs.size(); ++i)
        err = std::max(err, std::abs(sum.coeffs[i] - ref.coeffs[i]));
      worst = std::max(worst, err / std::max(ref.max_abs(), 1e-300));
    }
    suite.check("paraproduct_reconstruction", worst < 1e-10,
                "max rel err " + format_double(worst));
  }

  {  // Besov(2,2) vs homogeneous Sobolev
    double lo = kInf, hi = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const SpectralField f = random_field(g64, seed + 1300 + trial);
      for (double s : {0.0, 1.0}) {
        const BesovParams bp{s, 2.0, 2.0, true};
        const double b = besov_norm(f, part64, bp);
        const double h = homogeneous_hs_norm(f, s);
        if (h == 0.0) continue;
        lo = std::min(lo, b / h);
        hi = std::max(hi, b / h);
      }
    }
    suite.check("besov_sobolev_equivalence", lo >= 0.5 && hi <= 2.0,
                "ratio range [" + format_double(lo) + ", " + format_double(hi) +
                    "]");
  }

  {  // exact shear decay
    const ModelParams params = ModelParams::with_default_cutoff(0.7, 1.1, g64);
    SpectralField psi = SpectralField::zeros(g64);
    // u = (a sin(2πx₂/L), 0) from the streamfunction -a(L/2π)cos(2πx₂/L)
    const double a = 0.3;
    const double fac = -a / g64.two_pi_over_length();
    psi.at_wavenumber(0, 1) = Complex(fac * 0.5, 0.0);
    psi.at_wavenumber(0, -1) = Complex(fac * 0.5, 0.0);
    SimState state{perp_gradient(psi), SpectralField::zeros(g64), 0.0};
    StepperConfig sc;
    sc.dt = 1e-3;
    const int steps = 200;
    SimState cur = state;
    for (int i = 0; i < steps; ++i) cur = step(cur, params, sc);
    const double decay = std::exp(-params.nu * sc.dt * steps);
    double err = 0.0;
    for (std::size_t i = 0; i < cur.u.x.coeffs.size(); ++i)
      err = std::max({err,
                      std::abs(cur.u.x.coeffs[i] - decay * state.u.x.coeffs[i]),
                      std::abs(cur.u.y.coeffs[i] - decay * state.u.y.coeffs[i])});
    suite.check("shear_exact_decay", err < 1e-12,
                "max coeff err " + format_double(err));
  }

  {  // theta L2 decay equality on a generic small run
    const GridSpec g = g64;
    const auto partition = std::make_shared<const DyadicPartition>(part64);
    const ModelParams params = ModelParams::with_default_cutoff(1.0, 1.0, g);
    InitSpec init;
    init.shape = InitShape::random_band;
    init.seed = seed;
    init.band_lo = 1;
    init.band_hi = 6;
    init.target_grad_u_besov = 0.05;
    init.target_grad_theta_besov = 0.02;
    const SimState s0 = make_initial_data(init, g, *partition, params);
    RecorderOptions opts;
    const ThresholdConfig th = ThresholdConfig::derive(params, 1.0, 0.05);
    Recorder rec(partition, params, th, opts);
    Observers obs;
    obs.record = [&rec](const SimState& s) { return rec(s); };
    StepperConfig sc;
    sc.dt = 1e-3;
    sc.t_end = 0.5;
    sc.sample_every = 25;
    const Trajectory traj = run(s0, params, sc, obs);
    const DecayReport rep = theta_decay_check(traj, 2.0, params);
    suite.check("theta_l2_decay_equality", rep.max_rel_residual < 1e-6,
                "rel residual " + format_double(rep.max_rel_residual));
  }

  {  // vorticity/velocity consistency on a random small state
    const GridSpec g = g64;
    const ModelParams params = ModelParams::with_default_cutoff(0.9, 1.3, g);
    SpectralField psi = random_field(g, seed + 1400, 1, 8);
    psi *= 0.05;
    VectorField u = perp_gradient(psi);
    SpectralField theta = random_field(g, seed + 1500, 1, 8);
    theta *= 0.05;
    u = fourier_truncate(u, params.cutoff_N);
    theta = fourier_truncate(theta, params.cutoff_N);
    SimState state{u, theta, 0.0};
    const auto [du, dtheta] = rhs(state, params);
    const SpectralField curl_du = curl(du);
    const auto [domega, dtheta2] =
        vorticity_rhs(curl(state.u), state.theta, params);
    double err = 0.0;
    for (std::size_t i = 0; i < curl_du.coeffs.size(); ++i)
      err = std::max({err, std::abs(curl_du.coeffs[i] - domega.coeffs[i]),
                      std::abs(dtheta.coeffs[i] - dtheta2.coeffs[i])});
    const double rel = err / std::max(domega.max_abs(), 1e-300);
    suite.check("vorticity_form_consistency", rel < 1e-10,
                "max rel err " + format_double(rel));

    const SpectralField omega = curl(state.u);
    const VectorField ub = biot_savart(omega);
    double berr = 0.0;
    for (std::size_t i = 0; i < ub.x.coeffs.size(); ++i)
      berr = std::max({berr, std::abs(ub.x.coeffs[i] - state.u.x.coeffs[i]),
                       std::abs(ub.y.coeffs[i] - state.u.y.coeffs[i])});
    suite.check("biot_savart_inverse",
                berr < 1e-12 * std::max(state.u.max_abs(), 1e-300),
                "max coeff err " + format_double(berr));
  }

}

}  // namespace


}  // namespace bbq
