#pragma once

#include <cmath>
#include <vector>

namespace bbq {

// One time sample of the tracked scalar observables. The per-q and per-s
// vectors follow the recorder's configured q_list / s_list ordering.
struct DiagnosticsRecord {
  double t = 0.0;
  double l2_u = 0.0, l4_u = 0.0, linf_u = 0.0;
  double l2_theta = 0.0, l4_theta = 0.0, linf_theta = 0.0;
  double besov_grad_u = 0.0;      // ‖∇u‖ in B̊⁰_{∞,1}
  double besov_grad_theta = 0.0;  // ‖∇θ‖ in B̊⁰_{∞,1}
  std::vector<double> besov_grad_u_q;
  std::vector<double> besov_grad_theta_q;
  std::vector<double> hs_u;
  std::vector<double> hs_theta;
  double vortex_stretch = 0.0;
  double frac_a0 = 0.0;
  double frac_b0 = 0.0;

  bool finite() const {
    auto ok = [](double v) { return std::isfinite(v); };
    for (double v : {t, l2_u, l4_u, linf_u, l2_theta, l4_theta, linf_theta,
                     besov_grad_u, besov_grad_theta, vortex_stretch, frac_a0,
                     frac_b0})
      if (!ok(v)) return false;
    for (const auto* vec :
         {&besov_grad_u_q, &besov_grad_theta_q, &hs_u, &hs_theta})
      for (double v : *vec)
        if (!ok(v)) return false;
    return true;
  }
};

}  // namespace bbq
