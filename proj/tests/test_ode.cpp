#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pirk/ode_bench.hpp"

using namespace pirk;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

double max_stable_dt(const char* scheme, double sigma, double phi) {
  const SchemeId id = SchemeId::parse(scheme).value();
  auto stable = [&](double dt) {
    return run_ode_experiment(id, sigma, phi, dt, 100.0, 100000).stable;
  };
  double lo = 0.05, hi = 4.0;
  REQUIRE(stable(lo));
  REQUIRE(!stable(hi));
  for (int i = 0; i < 24; ++i) {
    const double mid = 0.5 * (lo + hi);
    (stable(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("coefficient map from (sigma, phi, omega)") {
  auto c = ode_coeffs_from(0.0, kPi / 2, 1.0);
  CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(c[2] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(c[3] == doctest::Approx(-1.0).epsilon(1e-14));

  c = ode_coeffs_from(-1.0, kPi / 2, 1.0);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(-1.0));
  CHECK(c[2] == doctest::Approx(-1.0));
  CHECK(c[3] == doctest::Approx(-1.0));

  c = ode_coeffs_from(0.0, kPi / 4, 1.0);
  CHECK(c[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(c[1] == doctest::Approx(-1.0));
  CHECK(c[2] == doctest::Approx(1.0));
  CHECK(c[3] == doctest::Approx(-std::sqrt(2.0)));

  CHECK_THROWS_AS(ode_coeffs_from(0.0, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(ode_coeffs_from(0.1, kPi / 2, 1.0), ConfigError);
  CHECK_THROWS_AS(ode_coeffs_from(0.0, kPi / 2, 0.0), ConfigError);
  CHECK_THROWS_AS(ode_coeffs_from(0.0, 2.0, 1.0), ConfigError);
}

TEST_CASE("problem invariants and parameter reconstruction") {
  std::mt19937 rng(2027);
  std::uniform_real_distribution<double> sig(-2.0, 0.0);
  std::uniform_real_distribution<double> ph(0.05, kPi / 2);
  std::uniform_real_distribution<double> om(0.3, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double sigma = sig(rng), phi = ph(rng), omega = om(rng);
    auto p = make_ode_problem(sigma, phi, omega);
    CHECK((p.b - p.c) * (p.b - p.c) + 4.0 * p.a * p.d < 0.0);
    CHECK(p.b + p.c <= 1e-14);
    CHECK(p.d == doctest::Approx(-p.a).epsilon(1e-15));
    const double w = 0.5 * std::sqrt(-4.0 * p.a * p.d - (p.b - p.c) * (p.b - p.c));
    const double s = 0.5 * (p.b + p.c);
    const double phi_rec = std::atan2(w, s - p.b);
    CHECK(w == doctest::Approx(omega).epsilon(1e-12));
    CHECK(s == doctest::Approx(sigma).epsilon(1e-12));
    CHECK(phi_rec == doctest::Approx(phi).epsilon(1e-12));
  }
}

TEST_CASE("analytic solution") {
  auto p = make_ode_problem(0.0, kPi / 2);
  auto uv = ode_analytic(p, 0.0);
  CHECK(uv[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(uv[1] == doctest::Approx(1.0));
  uv = ode_analytic(p, kPi / 2);
  CHECK(uv[0] == doctest::Approx(-1.0));
  CHECK(std::abs(uv[1]) < 1e-14);

  // central-difference residual against the right-hand side
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> sig(-1.5, 0.0);
  std::uniform_real_distribution<double> ph(0.1, kPi / 2);
  std::uniform_real_distribution<double> tt(0.0, 20.0);
  const double h = 1e-5;
  for (int i = 0; i < 100; ++i) {
    auto q = make_ode_problem(sig(rng), ph(rng));
    const double t = tt(rng);
    auto m = ode_analytic(q, t);
    auto fw = ode_analytic(q, t + h);
    auto bw = ode_analytic(q, t - h);
    const double du = (fw[0] - bw[0]) / (2.0 * h);
    const double dv = (fw[1] - bw[1]) / (2.0 * h);
    CHECK(du == doctest::Approx(q.c * m[0] + q.d * m[1]).epsilon(1e-9));
    CHECK(dv == doctest::Approx(q.a * m[0] + q.b * m[1]).epsilon(1e-9));
  }
}

TEST_CASE("error norm series") {
  auto p = make_ode_problem(0.0, kPi / 2);
  const double dt = 0.25;
  std::vector<OdeSample> exact, offset;
  for (int n = 1; n <= 40; ++n) {
    OdeSample s;
    s.t = n * dt;
    auto uv = ode_analytic(p, s.t);
    s.u_ana = uv[0];
    s.u_num = uv[0];
    exact.push_back(s);
    s.u_num = uv[0] + 0.125;
    offset.push_back(s);
  }
  for (double l2 : ode_error_norm(exact, p, dt)) CHECK(l2 == 0.0);

  auto series = ode_error_norm(offset, p, dt);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = offset[i].t;
    const double n = static_cast<double>(i + 1);
    CHECK(series[i] == doctest::Approx(0.125 * dt * std::sqrt(n) / t)
                           .epsilon(1e-12));
  }

  // with sigma < 0 the weight cancels a decaying error exactly
  auto pd = make_ode_problem(-0.3, kPi / 2);
  std::vector<OdeSample> decay;
  for (int n = 1; n <= 40; ++n) {
    OdeSample s;
    s.t = n * dt;
    s.u_ana = 0.0;
    s.u_num = 0.125 * std::exp(-0.3 * s.t);
    decay.push_back(s);
  }
  auto wseries = ode_error_norm(decay, pd, dt);
  for (std::size_t i = 0; i < wseries.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    CHECK(wseries[i] ==
          doctest::Approx(0.125 * dt * std::sqrt(n) / decay[i].t).epsilon(1e-12));
  }
}

TEST_CASE("first-order scheme stability window on the undamped problem") {
  auto id = SchemeId::parse("pirk1").value();
  for (double dt : {0.5, 1.0}) {
    auto r = run_ode_experiment(id, 0.0, kPi / 2, dt, 1000.0, 1000);
    CHECK(r.stable);
    CHECK(r.max_abs_u <= 1.1);
  }
  // near the dt = 2 threshold the update matrix is far from normal:
  // the modes stay on the unit circle but beats push |u| to ~3.2
  auto near = run_ode_experiment(id, 0.0, kPi / 2, 1.9, 1000.0, 1000);
  CHECK(near.stable);
  CHECK(near.l2_at_verdict < 1.0);
  CHECK(near.max_abs_u > 1.1);
  CHECK(near.max_abs_u < 3.3);

  auto beyond = run_ode_experiment(id, 0.0, kPi / 2, 2.1, 1000.0, 1000);
  CHECK(!beyond.stable);
  CHECK(beyond.max_abs_u > 1e6);
}

TEST_CASE("explicit low-order schemes grow on the undamped problem") {
  // per-step amplification is 1 + O(dt^2) (first order) and
  // 1 + O(dt^4) (second order), so the norm threshold is crossed by
  // t = 1000 only for the larger steps
  auto e1 = SchemeId::parse("erk1").value();
  auto r = run_ode_experiment(e1, 0.0, kPi / 2, 0.1, 1000.0, 1000);
  CHECK(!r.stable);
  CHECK(r.samples.back().l2 > 1.0);
  CHECK(r.max_abs_u > 1e6);

  r = run_ode_experiment(e1, 0.0, kPi / 2, 0.01, 1000.0, 1000);
  CHECK(r.max_abs_u > 100.0);   // amplitude has grown ~e^5
  CHECK(r.l2_at_verdict < 1.0); // but the averaged norm lags far behind
  CHECK(r.samples.back().l2 < 1.0);

  auto e2 = SchemeId::parse("erk2").value();
  r = run_ode_experiment(e2, 0.0, kPi / 2, 0.1, 1000.0, 1000);
  CHECK(r.max_abs_u > 1.1);  // growing, yet l2(1000) is only ~7e-3
  CHECK(r.samples.back().l2 < 1.0);
}

TEST_CASE("convergence orders from the de-weighted error") {
  struct Row {
    const char* scheme;
    double lo, hi;
  };
  // at sigma = 0, phi = pi/2 the first-order scheme (C1 = 1 is the
  // symplectic Euler update here) and the (1/4, 1/16) third-order one
  // superconverge by a full order; generic parameters restore the
  // nominal rates (separate test below)
  const Row rows[] = {{"pirk1", 1.7, 2.3},  {"pirk2a", 1.7, 2.3},
                      {"pirk2b", 1.7, 2.3}, {"pirk3a", 3.7, 4.3},
                      {"pirk3b", 2.7, 3.3}, {"pirk4", 3.7, 4.6},
                      {"erk3", 2.7, 3.3},   {"erk4", 3.7, 4.6},
                      {"imex3", 2.7, 3.3}};
  for (const auto& row : rows) {
    auto id = SchemeId::parse(row.scheme).value();
    auto coarse = run_ode_experiment(id, 0.0, kPi / 2, 1e-2, 100.0, 100000);
    auto fine = run_ode_experiment(id, 0.0, kPi / 2, 1e-3, 100.0, 100000);
    const double slope_rms =
        std::log(coarse.rms_at_verdict / fine.rms_at_verdict) / std::log(10.0);
    CAPTURE(row.scheme);
    CHECK(slope_rms >= row.lo);
    CHECK(slope_rms <= row.hi);
    // the squared-dt weight in the averaged norm adds exactly 1/2
    const double slope_l2 =
        std::log(coarse.l2_at_verdict / fine.l2_at_verdict) / std::log(10.0);
    CHECK(slope_l2 == doctest::Approx(slope_rms + 0.5).epsilon(0.02));
  }
}

TEST_CASE("generic parameters restore the nominal orders") {
  struct Row {
    const char* scheme;
    double order;
  };
  for (const Row& row : {Row{"pirk1", 1.0}, Row{"pirk3a", 3.0}}) {
    auto id = SchemeId::parse(row.scheme).value();
    auto coarse = run_ode_experiment(id, -0.1, kPi / 2, 1e-2, 100.0, 100000);
    auto fine = run_ode_experiment(id, -0.1, kPi / 2, 1e-3, 100.0, 100000);
    const double slope =
        std::log(coarse.rms_at_verdict / fine.rms_at_verdict) / std::log(10.0);
    CHECK(slope == doctest::Approx(row.order).epsilon(0.1));
  }
}

TEST_CASE("applicability predicates") {
  auto id = SchemeId::parse("pirk1").value();
  auto r = run_ode_experiment(id, 0.0, kPi / 2, 1.0, 1.0);
  CHECK(r.trace_condition);
  CHECK(r.det_condition);

  r = run_ode_experiment(id, -1.0, kPi / 2, 1.9, 1.0);
  CHECK(r.trace_condition);
  r = run_ode_experiment(id, -1.0, kPi / 2, 2.1, 1.0);
  CHECK(!r.trace_condition);

  // sigma = 0: the det bound reduces to dt <= sqrt(2) tan(phi) / omega
  const double dt_lim = std::sqrt(2.0) * std::tan(kPi / 10);
  r = run_ode_experiment(id, 0.0, kPi / 10, dt_lim - 0.01, 1.0);
  CHECK(r.det_condition);
  r = run_ode_experiment(id, 0.0, kPi / 10, dt_lim + 0.01, 1.0);
  CHECK(!r.det_condition);
}

TEST_CASE("stiff limit: implicit treatment brings no advantage") {
  const double a = max_stable_dt("pirk3a", -1.0, kPi / 2);
  const double b = max_stable_dt("erk3", -1.0, kPi / 2);
  CHECK(a / b < 1.5);
  CHECK(b / a < 1.5);
}

TEST_CASE("phase away from pi/2 favors the explicit scheme") {
  const double a = max_stable_dt("pirk3a", 0.0, kPi / 10);
  const double b = max_stable_dt("erk3", 0.0, kPi / 10);
  CHECK(a < b);
  CHECK(a == doctest::Approx(std::sqrt(2.0) * std::tan(kPi / 10)).epsilon(0.05));
}

TEST_CASE("run report bookkeeping") {
  auto id = SchemeId::parse("pirk2b").value();
  auto r = run_ode_experiment(id, 0.0, kPi / 2, 0.1, 10.0, 10);
  CHECK(r.record.steps == 100);
  CHECK(r.samples.size() == 11);  // t = 0 plus every 10th step
  CHECK(r.samples.front().t == 0.0);
  CHECK(r.samples.back().t == doctest::Approx(10.0));
  CHECK(r.record.counts.l1 == 200);

  CHECK_THROWS_AS(run_ode_experiment(id, 0.0, kPi / 2, -0.1, 1.0), ConfigError);
  CHECK_THROWS_AS(run_ode_experiment(id, 0.0, kPi / 2, 0.1, 1.0, 0),
                  ConfigError);
}
