#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "pirk/linear_system.hpp"
#include "pirk/tableau.hpp"

namespace pirk {

/// Thrown when a stage or step produces non-finite values.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double t, int stage)
      : std::runtime_error(what), t(t), stage(stage) {}
  double t;
  int stage;  // -1 when not attributable to a stage
};

/// A first-order-in-time system u' = L1(t,u,v), v' = L2(t,u) + L3(t,u,v).
/// L2 must depend on u (and t) only; that is what allows the implicit
/// treatment by substitution.
class SeparableWaveSystem {
 public:
  virtual ~SeparableWaveSystem() = default;
  virtual int dim_u() const = 0;
  virtual int dim_v() const = 0;
  virtual void eval_l1(double t, std::span<const double> u,
                       std::span<const double> v,
                       std::span<double> out) const = 0;
  virtual void eval_l2(double t, std::span<const double> u,
                       std::span<double> out) const = 0;
  virtual void eval_l3(double t, std::span<const double> u,
                       std::span<const double> v,
                       std::span<double> out) const = 0;
};

struct SystemState {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> v;
};

struct EvalCounts {
  std::int64_t l1 = 0;
  std::int64_t l2 = 0;
  std::int64_t l3 = 0;
};

class TimeStepper {
 public:
  virtual ~TimeStepper() = default;

  /// Advances state by dt in place.
  virtual void step(const SeparableWaveSystem& sys, SystemState& state,
                    double dt) = 0;

  /// Number of stages s (cost unit: operator evaluations per step).
  virtual int stages() const = 0;

  /// Drops any cached operator values (call after mutating the state
  /// externally between steps).
  virtual void invalidate_cache() {}

  const EvalCounts& counts() const { return counts_; }
  void reset_counts() { counts_ = {}; }

 protected:
  EvalCounts counts_;
};

/// Stepper for any tableau in the PIRK layout. Pure-explicit tableaus
/// never evaluate L2. The final-stage L2 value is cached and reused as
/// the next step's L2(u_n).
class PirkStepper : public TimeStepper {
 public:
  explicit PirkStepper(PirkTableau tableau);

  void step(const SeparableWaveSystem& sys, SystemState& state,
            double dt) override;
  int stages() const override { return tableau_.stages; }
  void invalidate_cache() override { cache_valid_ = false; }

  const PirkTableau& tableau() const { return tableau_; }

 private:
  PirkTableau tableau_;
  bool explicit_only_;
  std::vector<std::vector<double>> l1_, l3_, l2_;  // stage operator values
  std::vector<double> u_stage_, v_stage_;
  std::vector<double> l2_cache_;
  double cache_t_ = 0.0;
  bool cache_valid_ = false;
};

/// Dedicated stepper for the 2-stage additive pair with an L-stable
/// implicit part (gamma = 1 - 1/sqrt(2)); the implicit stages are again
/// resolved by substitution since L2 depends only on u.
class ImexSsp2Stepper : public TimeStepper {
 public:
  ImexSsp2Stepper() = default;
  void step(const SeparableWaveSystem& sys, SystemState& state,
            double dt) override;
  int stages() const override { return 2; }

 private:
  std::vector<double> u1_, u2_, v1_, v2_, l1a_, l1b_, l2a_, l2b_, l3a_, l3b_;
};

std::unique_ptr<TimeStepper> make_stepper(const SchemeId& id);

struct EvolutionRecord {
  std::int64_t steps = 0;
  EvalCounts counts;
  double t_final = 0.0;
  double wall_seconds = 0.0;
  /// max over operators of evaluations per simulated unit time
  double cost_per_unit_time = 0.0;
};

using Observer = std::function<void(const SystemState&, std::int64_t step)>;

/// Steps from state.t to t_end with fixed dt; times are accumulated as
/// t0 + n*dt and a shortened remainder step lands exactly on t_end. The
/// observer (if any) fires every `stride` steps and at the end.
EvolutionRecord evolve(const SeparableWaveSystem& sys, TimeStepper& stepper,
                       SystemState& state, double dt, double t_end,
                       const Observer& observer = {}, std::int64_t stride = 1);

using Mat2 = std::array<std::array<double, 2>, 2>;

/// System (u,v)' = (a1*u + a2*v, (g1+l)*u + g2*v) with L2 = l*u.
class LinearModelSystem : public SeparableWaveSystem {
 public:
  explicit LinearModelSystem(const LinearizedCoefficients& c) : c_(c) {}
  int dim_u() const override { return 1; }
  int dim_v() const override { return 1; }
  void eval_l1(double, std::span<const double> u, std::span<const double> v,
               std::span<double> out) const override {
    out[0] = c_.alpha1_bar * u[0] + c_.alpha2_bar * v[0];
  }
  void eval_l2(double, std::span<const double> u,
               std::span<double> out) const override {
    out[0] = c_.lambda_bar * u[0];
  }
  void eval_l3(double, std::span<const double> u, std::span<const double> v,
               std::span<double> out) const override {
    out[0] = c_.gamma1_bar * u[0] + c_.gamma2_bar * v[0];
  }

 private:
  LinearizedCoefficients c_;
};

/// One-step update matrix of a stepper on the linear model system,
/// columns = images of (1,0) and (0,1).
Mat2 linear_update_matrix_numeric(TimeStepper& stepper,
                                  const LinearizedCoefficients& coeffs,
                                  double dt);

}  // namespace pirk
