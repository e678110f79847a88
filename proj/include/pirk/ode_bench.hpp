#pragma once

#include <array>
#include <memory>
#include <vector>

#include "pirk/engine.hpp"
#include "pirk/tableau.hpp"

namespace pirk {

/// 2x2 linear test system u' = c*u + d*v, v' = a*u + b*v with damped
/// oscillatory solutions, parameterized by decay rate sigma <= 0,
/// relative phase phi in (0, pi/2] and frequency omega > 0.
struct OdeProblem {
  double sigma = 0.0;
  double phi = 0.0;
  double omega = 1.0;
  double v0 = 1.0;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

std::array<double, 4> ode_coeffs_from(double sigma, double phi,
                                      double omega = 1.0);

OdeProblem make_ode_problem(double sigma, double phi, double omega = 1.0,
                            double v0 = 1.0);

/// Analytic solution (u, v) at time t.
std::array<double, 2> ode_analytic(const OdeProblem& p, double t);

/// Splitting used by the steppers: L1 = c*u + d*v, L2 = a*u, L3 = b*v.
class OdeSystem final : public SeparableWaveSystem {
 public:
  explicit OdeSystem(const OdeProblem& p) : p_(p) {}
  int dim_u() const override { return 1; }
  int dim_v() const override { return 1; }
  void eval_l1(double t, std::span<const double> u, std::span<const double> v,
               std::span<double> out) const override;
  void eval_l2(double t, std::span<const double> u,
               std::span<double> out) const override;
  void eval_l3(double t, std::span<const double> u, std::span<const double> v,
               std::span<double> out) const override;

 private:
  OdeProblem p_;
};

struct OdeSample {
  double t = 0.0;
  double u_num = 0.0, v_num = 0.0;
  double u_ana = 0.0, v_ana = 0.0;
  double l2 = 0.0;
};

/// Time-averaged weighted L2 norm of the u error over uniform samples:
/// L2(t) = (1/t) sqrt(sum_{t_n <= t} [u_num - u_ana]^2 dt^2 e^{-2 sigma t_n}).
/// The series starts at the first sample after t = 0.
std::vector<double> ode_error_norm(std::span<const OdeSample> samples,
                                   const OdeProblem& p, double dt);

struct OdeRunReport {
  OdeProblem problem;
  SchemeId scheme;
  double dt = 0.0;
  std::vector<OdeSample> samples;  // strided, includes the final time
  double l2_at_verdict = 0.0;      // at t = 100 (or t_end if shorter)
  double rms_at_verdict = 0.0;     // sqrt(mean of weighted squared error);
                                   // equals l2 * t / (dt * sqrt(N)), free of
                                   // the dt^(1/2) factor the weighted sum
                                   // carries, so its slope vs dt is the
                                   // convergence order
  bool stable = false;             // l2_at_verdict < 1
  double max_abs_u = 0.0;
  bool failed = false;
  double failure_time = 0.0;
  // applicability predicates reported, not enforced:
  bool trace_condition = false;  // |trex| <= 2, i.e. dt <= -2/sigma
  bool det_condition = false;  // -2/dt <= 2s + (s^2 - w^2 cot^2 phi) dt <= 0
  EvolutionRecord record;
};

OdeRunReport run_ode_experiment(SchemeId scheme, double sigma, double phi,
                                double dt, double t_end, int stride = 1);

}  // namespace pirk
