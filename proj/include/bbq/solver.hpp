#pragma once

#include <cstdint>
#include <limits>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bbq/field.hpp"
#include "bbq/littlewood_paley.hpp"
#include "bbq/record.hpp"

namespace bbq {

struct ModelParams {
  double nu = 1.0;      // velocity damping
  double lambda = 1.0;  // temperature damping
  double cutoff_N = 0;  // truncation radius, physical wavenumber units

  void validate() const {
    if (!(nu > 0.0)) throw ParameterError("model: nu must be > 0");
    if (!(lambda > 0.0)) throw ParameterError("model: lambda must be > 0");
    if (!(cutoff_N > 0.0)) throw ParameterError("model: cutoff N must be > 0");
  }
  // Default cutoff: the dealias radius, so the truncated system and the
  // dealiased products share one ball.
  static ModelParams with_default_cutoff(double nu, double lambda,
                                         const GridSpec& grid) {
    return ModelParams{nu, lambda, grid.dealias_radius()};
  }
};

// One time slice of the truncated system. u stays divergence free and both
// fields stay inside the cutoff ball along the evolution.
struct SimState {
  VectorField u;
  SpectralField theta;
  double t = 0.0;

  const GridSpec& grid() const { return theta.grid; }
  bool finite() const { return u.finite() && theta.finite(); }
};

enum class Scheme { rk4_integrating_factor };

struct StepperConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::rk4_integrating_factor;
  double t_end = 1.0;
  int sample_every = 10;
  double cfl_safety = 0.5;
  // Test hook: advection off leaves the exactly solvable damped linear system
  // with buoyancy coupling.
  bool include_advection = true;

  void validate() const {
    if (!(dt > 0.0)) throw ParameterError("stepper: dt must be > 0");
    if (!(t_end >= 0.0)) throw ParameterError("stepper: t_end must be >= 0");
    if (sample_every < 1)
      throw ParameterError("stepper: sample_every must be >= 1");
  }
};

struct BlowUpInfo {
  double last_valid_time = 0.0;
  std::string reason;
};

struct Trajectory {
  std::vector<DiagnosticsRecord> samples;
  std::vector<SimState> snapshots;  // taken when Observers::keep_snapshots
  std::optional<BlowUpInfo> blow_up;
  int cfl_warnings = 0;
  SimState final_state;
};

struct Observers {
  std::function<DiagnosticsRecord(const SimState&)> record;  // may be empty
  std::function<void(const SimState&)> on_sample;            // may be empty
  bool keep_snapshots = false;
};

// Full tendency of the truncated system:
//   du     = -PJ_N(u·∇u) - νu + PJ_N(θe₂)
//   dtheta = -J_N(u·∇θ) - λθ
// Nonlinear products are formed pseudo-spectrally with radial 2/3 dealiasing.
std::pair<VectorField, SpectralField> rhs(const SimState& state,
                                          const ModelParams& params);

// Nonlinear + buoyancy block only (what RK4 integrates; damping is applied
// through exact integrating factors). max_speed returns max|u| over the grid.
std::pair<VectorField, SpectralField> rhs_nonlinear(const SimState& state,
                                                    const ModelParams& params,
                                                    double* max_speed = nullptr);

// One RK4 step with exact e^{-ν dt}, e^{-λ dt} damping factors. Throws
// BlowUpError on non-finite output and StabilityError when the advective CFL
// bound is exceeded 2x. cfl_warning is set when dt exceeds the bound at all.
SimState step(const SimState& state, const ModelParams& params,
              const StepperConfig& config, bool* cfl_warning = nullptr);

// Integrates to t_end, sampling every sample_every steps (step 0 included).
// Blow-up and CFL escalation truncate the trajectory cleanly.
Trajectory run(const SimState& initial, const ModelParams& params,
               const StepperConfig& config, const Observers& observers);

// Vorticity form: domega = -J_N(u·∇ω) - νω + ∂₁θ with u = biot_savart(ω);
// the θ tendency matches rhs. ω must be mean zero.
std::pair<SpectralField, SpectralField> vorticity_rhs(
    const SpectralField& omega, const SpectralField& theta,
    const ModelParams& params);

// One IF-RK4 step of the vorticity form (used by the formulation-equivalence
// checks).
std::pair<SpectralField, SpectralField> vorticity_step(
    const SpectralField& omega, const SpectralField& theta,
    const ModelParams& params, const StepperConfig& config);

// u = ∇⊥Δ⁻¹ω: divergence-free, mean-zero, curl(u) = ω exactly.
VectorField biot_savart(const SpectralField& omega);

// ‖∇u‖ (or ‖∇θ‖) in B̊⁰_{p,1} with the pointwise Euclidean magnitude over
// the gradient components; p = ∞ gives the critical norm of the smallness
// thresholds.
double grad_besov_norm(const VectorField& u, const DyadicPartition& part,
                       double p = std::numeric_limits<double>::infinity());
double grad_besov_norm(const SpectralField& f, const DyadicPartition& part,
                       double p = std::numeric_limits<double>::infinity());

enum class InitShape { taylor_green, random_band, file };

struct InitSpec {
  InitShape shape = InitShape::taylor_green;
  std::uint64_t seed = 0;
  double target_grad_u_besov = 0.0;
  double target_grad_theta_besov = 0.0;
  int band_lo = 1;   // random_band: integer wavenumber band
  int band_hi = 8;
  std::string file_u1, file_u2, file_theta;  // shape == file
};

struct InitReport {
  double achieved_grad_u_besov = 0.0;
  double achieved_grad_theta_besov = 0.0;
};

// Builds divergence-free u₀ and θ₀ of the requested shape, truncates to the
// cutoff ball, then rescales so ‖∇u₀‖ and ‖∇θ₀‖ in B̊⁰_{∞,1} hit the targets
// (the norms are 1-homogeneous in amplitude, so the rescale is exact).
SimState make_initial_data(const InitSpec& spec, const GridSpec& grid,
                           const DyadicPartition& partition,
                           const ModelParams& params,
                           InitReport* report = nullptr);

}  // namespace bbq
