#pragma once

#include <memory>
#include <optional>

#include "bbq/solver.hpp"

namespace bbq {

// Smallness thresholds. a0 and b0 are always derived from (ν, λ, c0) and the
// initial data, never set independently.
struct ThresholdConfig {
  double c0 = 0.0;
  double a0 = 0.0;
  double b0 = 0.0;

  static ThresholdConfig derive(const ModelParams& params, double c0,
                                double grad_u0_besov) {
    if (!(c0 > 0.0)) throw ParameterError("ThresholdConfig: c0 must be > 0");
    ThresholdConfig cfg;
    cfg.c0 = c0;
    cfg.a0 = std::min(params.nu / (2.0 * c0), params.lambda / c0);
    cfg.b0 = params.nu / (2.0 * c0) * grad_u0_besov;
    return cfg;
  }
};

struct RecorderOptions {
  std::vector<double> q_list;  // finite exponents for the per-q Besov columns
  std::vector<double> s_list;  // Sobolev indices tracked per sample
};

// Builds one DiagnosticsRecord per state snapshot. Pure; safe to call from
// any thread that owns the state.
class Recorder {
 public:
  Recorder(std::shared_ptr<const DyadicPartition> partition,
           ModelParams params, ThresholdConfig thresholds,
           RecorderOptions options);

  DiagnosticsRecord operator()(const SimState& state) const;
  const RecorderOptions& options() const { return options_; }
  const ThresholdConfig& thresholds() const { return thresholds_; }

 private:
  std::shared_ptr<const DyadicPartition> partition_;
  ModelParams params_;
  ThresholdConfig thresholds_;
  RecorderOptions options_;
};

// ‖(∇⊥θ·∇)u‖_{L²}, dealiased pseudo-spectral products.
double vortex_stretch_magnitude(const SimState& state);

// Zero-mean pressure from -Δp = ∂ₗu_m ∂_m u_ℓ - ∂₂θ, products dealiased and
// truncated like the momentum tendency so ∇p matches the Leray complement.
SpectralField pressure_recover(const SimState& state, const ModelParams& params);

struct DecayReport {
  double q = 2.0;
  // q = 2: max |‖θ(t)‖ - e^{-λt}‖θ₀‖| / ‖θ₀‖; q > 2: one-sided excess only.
  double max_rel_residual = 0.0;
};

DecayReport theta_decay_check(const Trajectory& traj, double q,
                              const ModelParams& params);

// Max relative violation of ‖u(t)‖₂ <= e^{-νt}‖u₀‖₂ + ‖θ₀‖₂/ν (0 when the
// bound holds everywhere).
double velocity_bound_check(const Trajectory& traj, const ModelParams& params);

struct ThresholdReport {
  bool hypotheses_met = false;
  std::optional<double> first_crossing;  // empty = "never"
  double max_frac_a0 = 0.0;
  double max_frac_b0 = 0.0;
};

ThresholdReport threshold_monitor(const Trajectory& traj,
                                  const ThresholdConfig& cfg);

struct InequalityResidual {
  double t = 0.0;
  double lhs = 0.0;   // d/dt ‖·‖ + damping·‖·‖ (centered differences)
  double rhs = 0.0;   // the bound evaluated with the given c0
  double slack = 0.0; // rhs - lhs
  double implied_c0 = 0.0;  // smallest c0 making slack >= 0 at this t
};

struct ResidualSeries {
  std::vector<InequalityResidual> velocity;
  std::vector<InequalityResidual> temperature;
  double max_implied_c0 = 0.0;
};

// q = ∞ uses the always-recorded B̊⁰_{∞,1} columns; finite q must appear in
// the recorder's q_list. Needs >= 3 samples at uniform cadence.
ResidualSeries inequality_residuals(const Trajectory& traj, double q,
                                    double c0, const ModelParams& params,
                                    const RecorderOptions& options);

struct CauchyReport {
  std::vector<double> cutoffs;
  std::vector<double> consecutive_l2;     // sup_t pairwise differences
  std::vector<double> consecutive_hstar;  // same in H̊_*^{-1/2}
};

// Runs the same initial data under each cutoff in lockstep (shared dt) and
// reports sup-in-time differences of consecutive pairs.
CauchyReport cauchy_convergence_study(const InitSpec& init,
                                      const GridSpec& grid,
                                      const ModelParams& base,
                                      const StepperConfig& config,
                                      const std::vector<double>& cutoffs);

struct UniquenessReport {
  bool rerun_bit_identical = false;
  double disc_coarse = 0.0;  // sup_t ‖traj(dt) - traj(dt/2)‖₂
  double disc_fine = 0.0;    // sup_t ‖traj(dt/2) - traj(dt/4)‖₂
  double halving_ratio = 0.0;
  double fitted_k = 0.0;     // disc_coarse ≈ K·dt⁴
  double perturbation_growth_rate = 0.0;  // fitted C in D(T) <= D(0)e^{CT}
};

UniquenessReport uniqueness_check(const SimState& initial,
                                  const ModelParams& params,
                                  const StepperConfig& config);

struct HsEnergyReport {
  std::vector<double> t;
  std::vector<double> y;      // ‖u‖_{H^s} + ‖θ‖_{H^s}
  double implied_constant = 0.0;
  bool monotone_after_transient = false;
};

// Requires s > 2 and s present in the recorder's s_list.
HsEnergyReport hs_energy_tracker(const Trajectory& traj, double s,
                                 const ModelParams& params,
                                 const RecorderOptions& options);

// The standard calibration battery: fixed small-data runs whose max implied
// c0 (u- and θ-inequalities, q ∈ {2, ∞}) defines the operational C₀.
struct BatteryRun {
  GridSpec grid;
  ModelParams params;
  StepperConfig stepper;
  InitSpec init;
};

std::vector<BatteryRun> calibration_battery();
double run_battery_c0(const std::vector<BatteryRun>& battery, int threads);
// Cached per process; deterministic.
double calibrate_c0(int threads);

}  // namespace bbq
