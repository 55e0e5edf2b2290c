// Acceptance suite: one line per criterion, pinned tolerances, exit 0 iff
// every criterion passes. Heavy trajectories run in parallel (BBQ_THREADS).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "bbq/diagnostics.hpp"
#include "bbq/parallel.hpp"
#include "bbq/rng.hpp"
#include "bbq/spectral_ops.hpp"
#include "bbq/summary.hpp"

using namespace bbq;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Gate {
  struct Line {
    int id;
    std::string text;
    bool pass;
  };
  std::vector<Line> lines;
  int failures = 0;
  void report(int id, const std::string& name, bool pass,
              const std::string& detail) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "[%s] %02d %-28s %s",
                  pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    lines.push_back(Line{id, buf, pass});
    std::fprintf(stderr, "%s\n", buf);  // progress while the suite runs
    if (!pass) ++failures;
  }
  void flush_sorted() {
    std::sort(lines.begin(), lines.end(),
              [](const Line& a, const Line& b) { return a.id < b.id; });
    for (const Line& l : lines) std::printf("%s\n", l.text.c_str());
  }
};

SpectralField random_field(const GridSpec& g, std::uint64_t seed, int k_lo = 1,
                           int k_hi = 0) {
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

Trajectory record_run(const SimState& init, const ModelParams& params,
                      const StepperConfig& sc,
                      std::shared_ptr<const DyadicPartition> part,
                      const ThresholdConfig& th, const RecorderOptions& opts) {
  Recorder recorder(std::move(part), params, th, opts);
  Observers obs;
  obs.record = [&recorder](const SimState& s) { return recorder(s); };
  return run(init, params, sc, obs);
}

double battery_implied_c0(const BatteryRun& br, const GridSpec& grid,
                          double dt) {
  const auto part =
      std::make_shared<const DyadicPartition>(build_partition(grid));
  const SimState init = make_initial_data(br.init, grid, *part, br.params);
  StepperConfig sc = br.stepper;
  sc.dt = dt;
  sc.sample_every =
      int(std::llround(br.stepper.sample_every * br.stepper.dt / dt));
  RecorderOptions opts;
  opts.q_list = {2.0};
  const ThresholdConfig dummy = ThresholdConfig::derive(br.params, 1.0, 1.0);
  const Trajectory traj = record_run(init, br.params, sc, part, dummy, opts);
  if (traj.blow_up) return kInf;
  double c0 = 0.0;
  for (double q : {kInf, 2.0})
    c0 = std::max(
        c0, inequality_residuals(traj, q, 1.0, br.params, opts).max_implied_c0);
  return c0;
}

}  // namespace

template <typename Fn>
void guarded(Gate& gate, int id, const std::string& name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    gate.report(id, name, false, std::string("exception: ") + e.what());
  }
}

int main() {
  const auto t_start = std::chrono::steady_clock::now();
  Gate gate;
  const int threads = recommended_threads();
  const GridSpec g128 = GridSpec::make(128);
  const GridSpec g256 = GridSpec::make(256);
  const auto part128 =
      std::make_shared<const DyadicPartition>(build_partition(g128));

  // ---- 1 & 2: exact theta decay and the velocity L2 bound -----------------
  guarded(gate, 1, "theta-decay-and-velocity-bound", [&] {
    const ModelParams params = ModelParams::with_default_cutoff(1.0, 1.0, g128);
    std::vector<Trajectory> trajs(3);
    parallel_for_jobs(3, threads, [&](int i) {
      InitSpec spec;
      spec.shape = InitShape::random_band;
      spec.seed = std::uint64_t(i + 1);
      spec.band_lo = 1;
      spec.band_hi = 8;
      spec.target_grad_u_besov = 0.05;
      spec.target_grad_theta_besov = 0.01;
      const SimState init = make_initial_data(spec, g128, *part128, params);
      StepperConfig sc;
      sc.dt = 1e-3;
      sc.t_end = 5.0;
      sc.sample_every = 20;
      trajs[std::size_t(i)] =
          record_run(init, params, sc, part128,
                     ThresholdConfig::derive(params, 1.0, 1.0),
                     RecorderOptions{});
    });
    double worst_decay = 0.0;
    double worst_vel = 0.0;
    bool clean = true;
    for (const Trajectory& traj : trajs) {
      clean = clean && !traj.blow_up;
      worst_decay = std::max(
          worst_decay, theta_decay_check(traj, 2.0, params).max_rel_residual);
      worst_vel = std::max(worst_vel, velocity_bound_check(traj, params));
    }
    gate.report(1, "theta-decay-exact", clean && worst_decay < 1e-6,
                "max rel residual " + format_double(worst_decay) +
                    " (tol 1e-6, 3 seeds, T=5, dt=1e-3)");
    gate.report(2, "velocity-l2-bound", clean && worst_vel <= 1e-4,
                "max rel violation " + format_double(worst_vel) +
                    " (allowance 1e-4)");
  });

  // ---- 3: shear-flow exact solution ---------------------------------------
  guarded(gate, 3, "shear-exact-solution", [&] {
    const ModelParams params = ModelParams::with_default_cutoff(0.7, 1.0, g128);
    SpectralField psi = SpectralField::zeros(g128);
    const double amp = 0.3;
    const double fac = -0.5 * amp / g128.two_pi_over_length();
    psi.at_wavenumber(0, 1) = Complex(fac, 0.0);
    psi.at_wavenumber(0, -1) = Complex(fac, 0.0);
    SimState state{perp_gradient(psi), SpectralField::zeros(g128), 0.0};
    const SimState init = state;
    StepperConfig sc;
    sc.dt = 1e-3;
    for (int i = 0; i < 1000; ++i) state = step(state, params, sc);
    const double decay = std::exp(-params.nu * 1.0);
    const RealField got_x = inverse_transform(state.u.x);
    const RealField want_x = inverse_transform(init.u.x);
    double err = 0.0;
    for (std::size_t i = 0; i < got_x.samples.size(); ++i)
      err = std::max(err,
                     std::abs(got_x.samples[i] - decay * want_x.samples[i]));
    err = std::max(err, inverse_transform(state.u.y).max_abs());
    gate.report(3, "shear-exact-solution", err < 1e-8,
                "max Linf error " + format_double(err) +
                    " (tol 1e-8, T=1, dt=1e-3)");
  });

  // ---- 4: partition of unity and homogeneous reconstruction ---------------
  guarded(gate, 4, "dyadic-partition", [&] {
    double worst_pu = 0.0;
    double worst_rec = 0.0;
    for (const GridSpec& g : {g128, g256}) {
      const DyadicPartition part = build_partition(g);
      for (int i1 = 0; i1 < g.n; ++i1)
        for (int i2 = 0; i2 < g.n; ++i2) {
          if (i1 == 0 && i2 == 0) continue;
          double sum = 0.0;
          for (int j = part.j_min; j <= part.j_max; ++j)
            sum += part.phi(j)[std::size_t(i1) * g.n + i2];
          worst_pu = std::max(worst_pu, std::abs(1.0 - sum));
        }
      const SpectralField f = random_field(g, 404);
      SpectralField sum = SpectralField::zeros(g);
      for (int j = part.j_min; j <= part.j_max; ++j)
        sum += dyadic_block(f, part, j, true);
      SpectralField target = f;
      target.coeffs[0] = 0.0;
      double err = 0.0;
      for (std::size_t i = 0; i < f.coeffs.size(); ++i)
        err = std::max(err, std::abs(sum.coeffs[i] - target.coeffs[i]));
      worst_rec = std::max(worst_rec, err / f.max_abs());
    }
    gate.report(4, "dyadic-partition", worst_pu < 1e-12 && worst_rec < 1e-12,
                "unity residue " + format_double(worst_pu) +
                    ", reconstruction " + format_double(worst_rec) +
                    " (tol 1e-12, n=128/256)");
  });

  // ---- 5: sharp-cutoff contraction and O(1/N) approximation ----------------
  guarded(gate, 5, "cutoff-contraction-approx", [&] {
    int violations = 0;
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const SpectralField f = random_field(g128, 1000 + trial);
      for (double s : {0.0, 1.0, 2.0}) {
        const double full = hs_norm(f, s);
        for (double frac : {0.125, 0.25, 0.5}) {
          const double nn = frac * g128.nyquist();
          const SpectralField jf = fourier_truncate(f, nn);
          if (hs_norm(jf, s) > full * (1.0 + 1e-14)) ++violations;
          if (s == 2.0)
            worst_ratio = std::max(
                worst_ratio, hs_norm(jf - f, 1.0) * nn / full);
        }
      }
    }
    gate.report(5, "cutoff-contraction-approx",
                violations == 0 && worst_ratio <= 1.0,
                std::to_string(violations) + " contraction violations, N*err/norm <= " +
                    format_double(worst_ratio) +
                    " (single constant 1 across N = ny/8, ny/4, ny/2)");
  });

  // ---- 6: two-sided frequency-localized norm bounds ------------------------
  guarded(gate, 6, "bernstein-constants", [&] {
    double lo = kInf, hi = 0.0;
    for (std::uint64_t seed : {1u, 2u}) {
      const SpectralField f = random_field(g128, 2000 + seed);
      for (int j : part128->resolved_blocks())
        for (double alpha : {0.0, 0.5, 1.0})
          for (auto [p, q] : std::vector<std::pair<double, double>>{
                   {2.0, 2.0}, {2.0, kInf}, {kInf, kInf}}) {
            const BernsteinReport rep =
                bernstein_check(f, *part128, j, alpha, p, q);
            if (rep.lhs == 0.0) continue;
            lo = std::min(lo, rep.lower_constant);
            hi = std::max(hi, rep.upper_constant);
          }
    }
    gate.report(6, "bernstein-constants", lo >= 0.25 && hi <= 4.0,
                "constants in [" + format_double(lo) + ", " +
                    format_double(hi) + "] (required within [1/4, 4])");
  });

  // ---- 7: paraproduct reconstruction ---------------------------------------
  guarded(gate, 7, "paraproduct-reconstruction", [&] {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const SpectralField f = random_field(g128, 3000 + trial);
      const SpectralField g = random_field(g128, 4000 + trial);
      const ParaproductSplit split = paraproduct_split(f, g, *part128);
      RealField prod = inverse_transform(f);
      const RealField gp = inverse_transform(g);
      for (std::size_t i = 0; i < prod.samples.size(); ++i)
        prod.samples[i] *= gp.samples[i];
      const SpectralField ref = dealias(forward_transform(prod));
      SpectralField sum = split.low_high;
      sum += split.high_low;
      sum += split.high_high;
      double err = 0.0;
      for (std::size_t i = 0; i < sum.coeffs.size(); ++i)
        err = std::max(err, std::abs(sum.coeffs[i] - ref.coeffs[i]));
      worst = std::max(worst, err / ref.max_abs());
    }
    gate.report(7, "paraproduct-reconstruction", worst < 1e-10,
                "max rel error " + format_double(worst) +
                    " (tol 1e-10, 100 pairs)");
  });

  // ---- 8: Besov(2,2) vs homogeneous Sobolev equivalence --------------------
  guarded(gate, 8, "besov-sobolev-equivalence", [&] {
    double lo = kInf, hi = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const SpectralField f = random_field(g128, 5000 + trial);
      for (double s : {0.0, 1.0}) {
        const double ratio =
            besov_norm(f, *part128, BesovParams{s, 2.0, 2.0, true}) /
            homogeneous_hs_norm(f, s);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    }
    gate.report(8, "besov-sobolev-equivalence", lo >= 0.5 && hi <= 2.0,
                "ratio range [" + format_double(lo) + ", " +
                    format_double(hi) + "] (required within [1/2, 2])");
  });

  // ---- 12 (battery first; its base runs calibrate C0 for 9) ----------------
  double calibrated_c0 = 0.0;
  guarded(gate, 12, "inequality-residuals", [&] {
    const std::vector<BatteryRun> battery = calibration_battery();
    const std::size_t nb = battery.size();
    std::vector<double> base(nb), half(nb), fine_grid(nb);
    struct Job {
      std::size_t config;
      int variant;  // 0 base, 1 dt/2, 2 n=256
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < nb; ++i)
      for (int v : {0, 1, 2}) jobs.push_back(Job{i, v});
    parallel_for_jobs(int(jobs.size()), threads, [&](int idx) {
      const Job& job = jobs[std::size_t(idx)];
      const BatteryRun& br = battery[job.config];
      if (job.variant == 0)
        base[job.config] = battery_implied_c0(br, br.grid, br.stepper.dt);
      else if (job.variant == 1)
        half[job.config] = battery_implied_c0(br, br.grid, br.stepper.dt / 2);
      else
        fine_grid[job.config] =
            battery_implied_c0(br, GridSpec::make(256), br.stepper.dt);
    });
    bool finite = true;
    double worst_dt = 0.0, worst_n = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      finite = finite && std::isfinite(base[i]) && base[i] > 0.0 &&
               std::isfinite(half[i]) && std::isfinite(fine_grid[i]);
      worst_dt = std::max(worst_dt, std::abs(half[i] - base[i]) / base[i]);
      worst_n =
          std::max(worst_n, std::abs(fine_grid[i] - base[i]) / base[i]);
      calibrated_c0 = std::max(calibrated_c0, base[i]);
    }
    gate.report(12, "inequality-residuals", finite && worst_dt <= 0.10 && worst_n <= 0.25,
                "c0 " + format_double(calibrated_c0) + ", dt-halving drift " +
                    format_double(worst_dt) + " (tol 0.10), n-refinement drift " +
                    format_double(worst_n) + " (tol 0.25)");
  });

  // ---- 9: threshold persistence at 50% smallness ----------------------------
  guarded(gate, 9, "threshold-persistence", [&] {
    const ModelParams params{1.0, 1.0, 40.0};
    const ThresholdConfig base_cfg =
        ThresholdConfig::derive(params, calibrated_c0, 1.0);
    const double target_u = 0.5 * base_cfg.a0;

    struct Outcome {
      bool ok = false;
      double frac_a = 0.0, frac_b = 0.0;
      std::string note;
    };
    std::vector<Outcome> outcomes(5);
    parallel_for_jobs(5, threads, [&](int i) {
      InitSpec spec;
      spec.shape = InitShape::random_band;
      spec.seed = std::uint64_t(11 + i);
      spec.band_lo = 1;
      spec.band_hi = 8;
      spec.target_grad_u_besov = target_u;
      spec.target_grad_theta_besov = 0.0;  // placeholder, set from B0 below
      InitReport rep;
      SimState init = make_initial_data(spec, g128, *part128, params, &rep);
      const ThresholdConfig th = ThresholdConfig::derive(
          params, calibrated_c0, rep.achieved_grad_u_besov);
      spec.target_grad_theta_besov = 0.5 * th.b0;
      init = make_initial_data(spec, g128, *part128, params, &rep);

      StepperConfig sc;
      sc.dt = 1e-3;
      sc.t_end = 20.0;
      sc.sample_every = 40;
      const Trajectory traj =
          record_run(init, params, sc, part128, th, RecorderOptions{});
      Outcome& out = outcomes[std::size_t(i)];
      if (traj.blow_up) {
        out.note = "blow-up: " + traj.blow_up->reason;
        return;
      }
      const ThresholdReport mon = threshold_monitor(traj, th);
      out.frac_a = mon.max_frac_a0;
      out.frac_b = mon.max_frac_b0;
      out.ok = mon.hypotheses_met && !mon.first_crossing &&
               mon.max_frac_a0 < 1.0 && mon.max_frac_b0 < 1.0;
      if (!out.ok)
        out.note = mon.first_crossing
                       ? "crossed at t = " + format_double(*mon.first_crossing)
                       : "hypotheses unmet";
    });
    bool all_ok = true;
    double fa = 0.0, fb = 0.0;
    std::string note;
    for (const Outcome& out : outcomes) {
      all_ok = all_ok && out.ok;
      fa = std::max(fa, out.frac_a);
      fb = std::max(fb, out.frac_b);
      if (!out.ok && note.empty()) note = out.note;
    }
    gate.report(9, "threshold-persistence", all_ok,
                all_ok ? "5 seeds, T=20, no crossing; max fractions A0 " +
                             format_double(fa) + ", B0 " + format_double(fb)
                       : note);
  });

  // ---- 10: refinement convergence in L2 and the hybrid negative norm -------
  guarded(gate, 10, "cauchy-refinement", [&] {
    InitSpec spec;
    spec.shape = InitShape::random_band;
    spec.seed = 77;
    spec.band_lo = 1;
    spec.band_hi = 6;
    spec.target_grad_u_besov = 0.05;
    spec.target_grad_theta_besov = 0.01;
    ModelParams base{1.0, 1.0, 1.0};
    StepperConfig sc;
    sc.dt = 2e-3;
    sc.t_end = 2.0;
    sc.sample_every = 10;
    const CauchyReport rep = cauchy_convergence_study(
        spec, g256, base, sc, std::vector<double>{16.0, 32.0, 64.0});
    const double ratio_l2 = rep.consecutive_l2[0] / rep.consecutive_l2[1];
    const bool hstar_decreasing =
        rep.consecutive_hstar[1] < rep.consecutive_hstar[0];
    gate.report(10, "cauchy-refinement",
                ratio_l2 >= 2.0 && hstar_decreasing &&
                    rep.consecutive_l2[1] > 0.0,
                "L2 diffs " + format_double(rep.consecutive_l2[0]) + " -> " +
                    format_double(rep.consecutive_l2[1]) + " (ratio " +
                    format_double(ratio_l2) + " >= 2), hstar " +
                    format_double(rep.consecutive_hstar[0]) + " -> " +
                    format_double(rep.consecutive_hstar[1]));
  });

  // ---- 11: order/uniqueness surrogate ---------------------------------------
  guarded(gate, 11, "order-uniqueness", [&] {
    InitSpec spec;
    spec.shape = InitShape::random_band;
    spec.seed = 88;
    spec.band_lo = 1;
    spec.band_hi = 8;
    // Sized so the dt^4 discrepancy sits orders of magnitude above the
    // rounding floor (tiny data at tiny dt agrees to machine epsilon and
    // the halving ratio becomes noise).
    spec.target_grad_u_besov = 0.3;
    spec.target_grad_theta_besov = 0.1;
    const ModelParams params{0.8, 1.2, 40.0};
    const SimState init = make_initial_data(spec, g128, *part128, params);
    StepperConfig sc;
    sc.dt = 1e-2;
    sc.t_end = 1.0;
    const UniquenessReport rep = uniqueness_check(init, params, sc);
    gate.report(11, "order-uniqueness",
                rep.rerun_bit_identical && rep.halving_ratio >= 12.0 &&
                    rep.halving_ratio <= 20.0,
                "halving ratio " + format_double(rep.halving_ratio) +
                    " (required [12, 20]), rerun bit-identical: " +
                    (rep.rerun_bit_identical ? "yes" : "no"));
  });

  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t_start)
                          .count();
  gate.flush_sorted();
  std::printf("%s: %d criterion failure(s), %.1f s wall\n",
              gate.failures == 0 ? "ACCEPTANCE OK" : "ACCEPTANCE FAILED",
              gate.failures, wall);
  return gate.failures == 0 ? 0 : 1;
}
