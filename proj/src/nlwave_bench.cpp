#include "pirk/nlwave_bench.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include "pirk/fd_stencil.hpp"

namespace pirk {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559005768;

struct EarlyStop {
  double t;
  bool finite;
};
}  // namespace

NlWaveSystem::NlWaveSystem(int n_points, int space_order, bool cubic_implicit)
    : n_(n_points), cubic_implicit_(cubic_implicit) {
  if (n_points < 2 * space_order)
    throw ConfigError("nlwave grid too coarse for the stencil");
  dx_ = kTwoPi / n_points;
  w2_ = centered_stencil(2, space_order);
  for (auto& w : w2_) w /= dx_ * dx_;
}

void NlWaveSystem::eval_l1(double, std::span<const double>,
                           std::span<const double> v,
                           std::span<double> out) const {
  for (int i = 0; i < n_; ++i) out[i] = v[i];
}

void NlWaveSystem::eval_l2(double, std::span<const double> u,
                           std::span<double> out) const {
  const int half = static_cast<int>(w2_.size()) / 2;
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int q = -half; q <= half; ++q)
      s += w2_[q + half] * u[(i + q + n_) % n_];
    if (cubic_implicit_) s -= u[i] * u[i] * u[i];
    out[i] = s;
  }
}

void NlWaveSystem::eval_l3(double, std::span<const double> u,
                           std::span<const double>,
                           std::span<double> out) const {
  if (cubic_implicit_) {
    for (int i = 0; i < n_; ++i) out[i] = 0.0;
    return;
  }
  for (int i = 0; i < n_; ++i) out[i] = -u[i] * u[i] * u[i];
}

std::vector<double> nlwave_initial_h(int n_points, double amplitude) {
  std::vector<double> h(n_points);
  const double dx = kTwoPi / n_points;
  for (int i = 0; i < n_points; ++i)
    h[i] = amplitude * std::cos(i * dx) + 1e-12 * std::sin(i * dx);
  return h;
}

HamiltonianParts hamiltonian(std::span<const double> h,
                             std::span<const double> a, double dx,
                             int space_order) {
  const int n = static_cast<int>(h.size());
  auto w1 = centered_stencil(1, space_order);
  const int half = space_order / 2;
  HamiltonianParts parts;
  for (int i = 0; i < n; ++i) {
    double hx = 0.0;
    for (int q = -half; q <= half; ++q)
      hx += w1[q + half] * h[(i + q + n) % n];
    hx /= dx;
    parts.kinetic += 0.5 * a[i] * a[i];
    parts.gradient += 0.5 * hx * hx;
    parts.potential += 0.25 * h[i] * h[i] * h[i] * h[i];
  }
  parts.kinetic *= dx;
  parts.gradient *= dx;
  parts.potential *= dx;
  parts.total = parts.kinetic + parts.gradient + parts.potential;
  return parts;
}

double hamiltonian_error(std::span<const double> h_series) {
  if (h_series.size() < 2) return 0.0;
  const double h0 = h_series[0];
  if (h0 == 0.0) throw ConfigError("hamiltonian_error needs H0 != 0");
  double acc = 0.0;
  for (size_t i = 1; i < h_series.size(); ++i) {
    const double rel = (h0 - h_series[i]) / h0;
    acc += rel * rel;
  }
  return std::sqrt(acc / static_cast<double>(h_series.size() - 1));
}

double overlap(std::span<const double> h,
               const std::function<double(double)>& f, double dx) {
  double acc = 0.0;
  for (size_t i = 0; i < h.size(); ++i) acc += h[i] * f(i * dx);
  return acc * dx;
}

NlWaveRunReport run_nlwave_experiment(const NlWaveConfig& cfg, double cfl) {
  if (cfg.n_points < 12 || cfg.t_end <= 0 || cfl <= 0)
    throw ConfigError("invalid nonlinear wave configuration");
  NlWaveSystem sys(cfg.n_points, cfg.space_order, cfg.cubic_implicit);
  const double dx = sys.dx();
  const double dt = cfl * dx;

  NlWaveRunReport rep;
  rep.dt = dt;

  SystemState state;
  state.t = 0.0;
  state.u = nlwave_initial_h(cfg.n_points, cfg.amplitude);
  state.v.assign(cfg.n_points, 0.0);

  const auto ham0 = hamiltonian(state.u, state.v, dx, cfg.space_order);
  rep.h0 = ham0.total;

  auto stepper = make_stepper(cfg.scheme);

  auto cosx = [](double x) { return std::cos(x); };
  auto cos3x = [](double x) { return std::cos(3 * x); };
  auto sinx = [](double x) { return std::sin(x); };

  double acc = 0.0;  // running integral of rel^2 dt
  double next_sample = 0.0;
  std::int64_t last_step = -1;

  auto record = [&](const SystemState& st, double rel,
                    const HamiltonianParts& parts) {
    NlWaveSample s;
    s.t = st.t;
    s.ham = parts;
    s.a_cosx = overlap(st.u, cosx, dx);
    s.a_cos3x = overlap(st.u, cos3x, dx);
    s.a_sinx = overlap(st.u, sinx, dx);
    s.rel_dh = rel;
    rep.samples.push_back(s);
  };
  record(state, 0.0, ham0);
  next_sample = cfg.sample_interval;

  auto observer = [&](const SystemState& st, std::int64_t step) {
    if (step == last_step) return;
    last_step = step;
    const auto parts = hamiltonian(st.u, st.v, dx, cfg.space_order);
    if (!std::isfinite(parts.total)) throw EarlyStop{st.t, false};
    const double rel = (rep.h0 - parts.total) / rep.h0;
    acc += rel * rel * dt;
    if (st.t >= next_sample - 0.5 * dt) {
      record(st, rel, parts);
      next_sample += cfg.sample_interval;
    }
    // the time average over [0, t_end] can only grow from here
    if (acc > cfg.t_end) throw EarlyStop{st.t, true};
  };

  try {
    rep.record = evolve(sys, *stepper, state, dt, cfg.t_end, observer);
    rep.error_h = std::sqrt(acc / cfg.t_end);
    rep.stable = rep.error_h <= 1.0;
  } catch (const EarlyStop& stop) {
    rep.error_h = std::sqrt(acc / cfg.t_end);
    rep.stable = false;
    rep.failed = !stop.finite;
    rep.failure_time = stop.t;
  } catch (const NumericalFailure& f) {
    rep.error_h = std::numeric_limits<double>::infinity();
    rep.stable = false;
    rep.failed = true;
    rep.failure_time = f.t;
  }
  return rep;
}

std::optional<double> max_stable_cfl(const NlWaveConfig& cfg,
                                     std::span<const double> cfl_grid) {
  std::optional<double> best;
  for (double cfl : cfl_grid) {
    if (best && cfl <= *best)
      throw ConfigError("cfl grid must be ascending");
    if (!run_nlwave_experiment(cfg, cfl).stable) break;
    best = cfl;
  }
  return best;
}

std::vector<double> default_cfl_grid() {
  std::vector<double> grid;
  grid.push_back(0.1);
  grid.push_back(0.125);
  for (int i = 2; i <= 20; ++i) grid.push_back(0.1 * i);
  return grid;
}

}  // namespace pirk
