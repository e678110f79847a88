#include "pirk/engine.hpp"

#include <chrono>
#include <cmath>

namespace pirk {

namespace {

void check_finite(const std::vector<double>& x, double t, int stage,
                  const char* what) {
  for (double e : x) {
    if (!std::isfinite(e)) {
      throw NumericalFailure(std::string("non-finite ") + what +
                                 " at stage " + std::to_string(stage),
                             t, stage);
    }
  }
}

}  // namespace

PirkStepper::PirkStepper(PirkTableau tableau)
    : tableau_(std::move(tableau)), explicit_only_(tableau_.pure_explicit()) {
  const int s = tableau_.stages;
  l1_.resize(s);
  l3_.resize(s);
  l2_.resize(s + 1);
}

void PirkStepper::step(const SeparableWaveSystem& sys, SystemState& state,
                       double dt) {
  const int s = tableau_.stages;
  const int nu = sys.dim_u(), nv = sys.dim_v();
  for (auto& b : l1_) b.resize(nu);
  for (auto& b : l3_) b.resize(nv);
  for (auto& b : l2_) b.resize(nv);
  u_stage_.resize(nu);
  v_stage_.resize(nv);

  const double t0 = state.t;
  sys.eval_l1(t0, state.u, state.v, l1_[0]);
  ++counts_.l1;
  if (!explicit_only_) {
    // the caller may snap state.t between steps; rounding-level drift
    // must not defeat the cache
    if (cache_valid_ && std::abs(cache_t_ - t0) <= 1e-9 * (std::abs(t0) + 1.0) &&
        l2_cache_.size() == static_cast<std::size_t>(nv)) {
      l2_[0] = l2_cache_;
    } else {
      sys.eval_l2(t0, state.u, l2_[0]);
      ++counts_.l2;
    }
  }
  sys.eval_l3(t0, state.u, state.v, l3_[0]);
  ++counts_.l3;

  for (int i = 1; i <= s; ++i) {
    const double ti = t0 + tableau_.stage_abscissa(i) * dt;
    const auto& arow = i < s ? tableau_.a[i] : tableau_.b;
    for (int k = 0; k < nu; ++k) {
      double acc = state.u[k];
      for (int j = 0; j < i; ++j) acc += dt * arow[j] * l1_[j][k];
      u_stage_[k] = acc;
    }
    check_finite(u_stage_, ti, i, "u stage");

    if (!explicit_only_) {
      sys.eval_l2(ti, u_stage_, l2_[i]);
      ++counts_.l2;
    }
    const auto& irow = tableau_.a_tilde[i];
    for (int k = 0; k < nv; ++k) {
      double acc = state.v[k];
      for (int j = 0; j < i; ++j) acc += dt * arow[j] * l3_[j][k];
      if (!explicit_only_) {
        for (int j = 0; j <= i; ++j) acc += dt * irow[j] * l2_[j][k];
      }
      v_stage_[k] = acc;
    }
    check_finite(v_stage_, ti, i, "v stage");

    if (i < s) {
      sys.eval_l1(ti, u_stage_, v_stage_, l1_[i]);
      ++counts_.l1;
      sys.eval_l3(ti, u_stage_, v_stage_, l3_[i]);
      ++counts_.l3;
    }
  }

  state.u.swap(u_stage_);
  state.v.swap(v_stage_);
  state.t = t0 + dt;
  if (!explicit_only_) {
    l2_cache_ = l2_[s];
    cache_t_ = state.t;
    cache_valid_ = true;
  }
}

void ImexSsp2Stepper::step(const SeparableWaveSystem& sys, SystemState& state,
                           double dt) {
  const double g = 1.0 - 1.0 / std::sqrt(2.0);
  const int nu = sys.dim_u(), nv = sys.dim_v();
  u1_.resize(nu);
  u2_.resize(nu);
  v1_.resize(nv);
  v2_.resize(nv);
  l1a_.resize(nu);
  l1b_.resize(nu);
  l2a_.resize(nv);
  l2b_.resize(nv);
  l3a_.resize(nv);
  l3b_.resize(nv);
  const double t0 = state.t;

  // stage 1: u unchanged, v advanced by the implicit diagonal alone
  u1_ = state.u;
  sys.eval_l2(t0 + g * dt, u1_, l2a_);
  ++counts_.l2;
  for (int k = 0; k < nv; ++k) v1_[k] = state.v[k] + g * dt * l2a_[k];
  check_finite(v1_, t0, 1, "v stage");

  sys.eval_l1(t0, u1_, v1_, l1a_);
  ++counts_.l1;
  sys.eval_l3(t0, u1_, v1_, l3a_);
  ++counts_.l3;

  // stage 2
  for (int k = 0; k < nu; ++k) u2_[k] = state.u[k] + dt * l1a_[k];
  check_finite(u2_, t0, 2, "u stage");
  sys.eval_l2(t0 + (1.0 - g) * dt, u2_, l2b_);
  ++counts_.l2;
  for (int k = 0; k < nv; ++k)
    v2_[k] = state.v[k] +
             dt * ((1.0 - 2.0 * g) * l2a_[k] + g * l2b_[k] + l3a_[k]);
  check_finite(v2_, t0, 2, "v stage");
  sys.eval_l1(t0 + dt, u2_, v2_, l1b_);
  ++counts_.l1;
  sys.eval_l3(t0 + dt, u2_, v2_, l3b_);
  ++counts_.l3;

  for (int k = 0; k < nu; ++k)
    state.u[k] += 0.5 * dt * (l1a_[k] + l1b_[k]);
  for (int k = 0; k < nv; ++k)
    state.v[k] += 0.5 * dt * (l2a_[k] + l2b_[k] + l3a_[k] + l3b_[k]);
  state.t = t0 + dt;
  check_finite(state.u, state.t, -1, "u");
  check_finite(state.v, state.t, -1, "v");
}

std::unique_ptr<TimeStepper> make_stepper(const SchemeId& id) {
  if (id.kind == SchemeId::Kind::ImexSsp2_222)
    return std::make_unique<ImexSsp2Stepper>();
  return std::make_unique<PirkStepper>(pirk_tableau(id));
}

EvolutionRecord evolve(const SeparableWaveSystem& sys, TimeStepper& stepper,
                       SystemState& state, double dt, double t_end,
                       const Observer& observer, std::int64_t stride) {
  if (dt <= 0.0) throw ConfigError("dt must be positive");
  if (t_end < state.t) throw ConfigError("t_end before initial time");
  const double t0 = state.t;
  const auto wall0 = std::chrono::steady_clock::now();
  EvolutionRecord rec;
  stepper.reset_counts();

  std::int64_t n = 0;
  while (true) {
    const double t_next = t0 + static_cast<double>(n + 1) * dt;
    if (t_next > t_end + 1e-12 * dt) break;
    stepper.step(sys, state, dt);
    ++n;
    state.t = t0 + static_cast<double>(n) * dt;
    if (observer && stride > 0 && n % stride == 0) observer(state, n);
  }
  const double remainder = t_end - state.t;
  if (remainder > 1e-12 * dt) {
    stepper.step(sys, state, remainder);
    ++n;
  }
  state.t = t_end;
  if (observer) observer(state, n);

  rec.steps = n;
  rec.counts = stepper.counts();
  rec.t_final = state.t;
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0)
          .count();
  const double span = t_end - t0;
  if (span > 0.0) {
    const auto m =
        std::max(rec.counts.l1, std::max(rec.counts.l2, rec.counts.l3));
    rec.cost_per_unit_time = static_cast<double>(m) / span;
  }
  return rec;
}

Mat2 linear_update_matrix_numeric(TimeStepper& stepper,
                                  const LinearizedCoefficients& coeffs,
                                  double dt) {
  LinearModelSystem sys(coeffs);
  Mat2 m{};
  for (int col = 0; col < 2; ++col) {
    SystemState st;
    st.t = 0.0;
    st.u = {col == 0 ? 1.0 : 0.0};
    st.v = {col == 0 ? 0.0 : 1.0};
    stepper.invalidate_cache();
    stepper.step(sys, st, dt);
    m[0][col] = st.u[0];
    m[1][col] = st.v[0];
  }
  stepper.invalidate_cache();
  return m;
}

}  // namespace pirk
