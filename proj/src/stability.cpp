#include "pirk/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pirk {

namespace {

Mat2 mul(const Mat2& a, const Mat2& b) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

Mat2 add(const Mat2& a, const Mat2& b) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}

Mat2 smul(double k, const Mat2& a) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = k * a[i][j];
  return r;
}

}  // namespace

Classification classify_system(const LinearizedCoefficients& c) {
  const double disc = (c.alpha1_bar - c.gamma2_bar) * (c.alpha1_bar - c.gamma2_bar) +
                      4.0 * c.alpha2_bar * (c.gamma1_bar + c.lambda_bar);
  const double tr = c.alpha1_bar + c.gamma2_bar;
  Classification out;
  const std::complex<double> root = std::sqrt(std::complex<double>(disc, 0.0));
  out.sigma_plus = 0.5 * (tr + root);
  out.sigma_minus = 0.5 * (tr - root);
  if (disc < 0.0) {
    out.cls = c.alpha2_bar * c.lambda_bar < 0.0
                  ? SystemClass::SeparableWaveLike
                  : SystemClass::WaveLike;
  } else {
    out.cls = SystemClass::NotWaveLike;
  }
  return out;
}

Mat2 explicit_matrix(const ScaledCoefficients& c) {
  return {{{1.0 + c.alpha1, c.alpha2}, {c.gamma1, 1.0 + c.gamma2}}};
}

double det2(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
double trace2(const Mat2& m) { return m[0][0] + m[1][1]; }

std::array<std::complex<double>, 2> eig2(const Mat2& m) {
  const double tr = trace2(m), d = det2(m);
  const std::complex<double> root =
      std::sqrt(std::complex<double>(tr * tr - 4.0 * d, 0.0));
  return {0.5 * (tr + root), 0.5 * (tr - root)};
}

double spectral_radius(const Mat2& m) {
  const auto e = eig2(m);
  return std::max(std::abs(e[0]), std::abs(e[1]));
}

double k1_of(double dex, double trex) {
  return (1.0 - dex) * (1.0 - dex) + trex * trex;
}
double k2_of(double dex, double /*trex*/) { return 1.0 - dex; }
double k3_of(double dex, double trex) {
  const double t1 = trex - 1.0;
  return 14.0 + 2.0 * t1 * t1 * t1 + (dex - 2.0) * (dex - 2.0) * (dex - 2.0) +
         6.0 * trex * trex + 3.0 * dex * (t1 * t1 - 2.0);
}
double k4_of(double dex, double trex) {
  return (dex - 2.0) * (dex - 2.0) + (trex - 1.0) * (trex - 1.0) - 2.0;
}

ExplicitSpectrum explicit_spectrum(const ScaledCoefficients& c) {
  ExplicitSpectrum sp;
  const Mat2 m = explicit_matrix(c);
  const auto e = eig2(m);
  sp.omega1 = e[0];
  sp.omega2 = e[1];
  sp.dex = det2(m);
  sp.trex = trace2(m);
  sp.k1 = k1_of(sp.dex, sp.trex);
  sp.k2 = k2_of(sp.dex, sp.trex);
  sp.k3 = k3_of(sp.dex, sp.trex);
  sp.k4 = k4_of(sp.dex, sp.trex);
  sp.s_param = c.s_param();
  sp.x = -sp.s_param;
  return sp;
}

StabilityVerdict verdict_of(const Mat2& m, double tol) {
  StabilityVerdict v;
  v.spectral_radius = spectral_radius(m);
  v.det_value = det2(m);
  v.eigen_stable = v.spectral_radius <= 1.0 + tol;
  v.det_bounded = std::abs(v.det_value) <= 1.0 + tol;
  return v;
}

Mat2 m_matrix_closed(int order, const ScaledCoefficients& c,
                     std::span<const double> C) {
  const double a1 = c.alpha1, a2 = c.alpha2, g1 = c.gamma1, g2 = c.gamma2,
               l = c.lambda;
  switch (order) {
    case 1: {
      const double c1 = C[0];
      return {{{1.0 + a1, a2},
               {g1 + l * (1.0 + a1 * c1), 1.0 + g2 + l * a2 * c1}}};
    }
    case 2: {
      const double c1 = C[0], c2 = C[1];
      const Mat2 m1 = {{{1.0 + a1, a2},
                        {g1 + l * (1.0 + a1 * c1), 1.0 + g2 + l * a2 * c1}}};
      const Mat2 left = {{{1.0, 0.0}, {(0.5 - c2) * l, 1.0}}};
      const Mat2 first = {{{0.5, 0.0}, {(l + g1) / 2.0, 1.0 + g2 / 2.0}}};
      const Mat2 second = {{{1.0 + a1, a2}, {g1 + 2.0 * l * c2, g2}}};
      return mul(left, add(first, smul(0.5, mul(second, m1))));
    }
    case 3: {
      const double c1 = C[0], c2 = C[1];
      const Mat2 n1 =
          mul(Mat2{{{1.0, 0.0}, {l * c1, 1.0}}},
              Mat2{{{1.0 + a1, a2}, {g1 + l * (1.0 - c1), 1.0 + g2}}});
      const Mat2 n2_inner = add(
          Mat2{{{1.0 + a1 / 4.0, a2 / 4.0},
                {g1 / 4.0 + (c1 + 2.0 * c2) * l / 2.0, 1.0 + g2 / 4.0}}},
          mul(Mat2{{{a1 / 4.0, a2 / 4.0}, {g1 / 4.0 + l * c2, g2 / 4.0}}}, n1));
      const Mat2 n2 =
          mul(Mat2{{{1.0, 0.0}, {(1.0 - c1 - 4.0 * c2) * l / 2.0, 1.0}}},
              n2_inner);
      const Mat2 head = {{{1.0 + a1 / 6.0, a2 / 6.0},
                          {(g1 + l) / 6.0, 1.0 + g2 / 6.0}}};
      const Mat2 ops = {{{a1, a2}, {g1 + l, g2}}};
      return add(head, mul(ops, add(smul(1.0 / 6.0, n1), smul(2.0 / 3.0, n2))));
    }
    default:
      throw ConfigError("closed-form update matrix only for orders 1..3");
  }
}

double det_m(int order, double dex, double trex, double s,
             std::span<const double> C) {
  switch (order) {
    case 1:
      return dex - s * (1.0 - C[0]);
    case 2: {
      const double c1 = C[0], c2 = C[1];
      return 0.25 * ((1.0 - dex) * (1.0 - dex) + trex * trex +
                     s * (1.0 - dex) * (1.0 - 2.0 * c1 + 2.0 * c2) +
                     s * s * (2.0 * c2 - c1 - 2.0 * c1 * c2));
    }
    case 3: {
      const double c1 = C[0], c2 = C[1];
      return k3_of(dex, trex) / 36.0 +
             s * (-1.0 + c1 - 4.0 * c2) * k4_of(dex, trex) / 24.0 +
             s * s / 12.0 *
                 (c1 - 4.0 * c2 +
                  (dex - 1.0) * (4.0 * c2 - c1 * c1 - 4.0 * c1 * c2)) -
             s * s * s / 72.0 *
                 (-1.0 + 3.0 * (1.0 - 2.0 * c1) * (c1 + 4.0 * c2));
    }
    default:
      throw ConfigError("closed-form determinant only for orders 1..3");
  }
}

double det_m4(const ScaledCoefficients& c, const std::array<double, 5>& C) {
  // the engine sees rates; with dt = 1 rates and scaled values coincide
  LinearizedCoefficients bar{c.alpha1, c.alpha2, c.gamma1, c.gamma2, c.lambda};
  PirkStepper stepper(pirk_tableau(SchemeId::pirk4_custom(C)));
  return det2(linear_update_matrix_numeric(stepper, bar, 1.0));
}

LinearizedCoefficients realize_omega_pattern(double w1, double w2, double s) {
  return {w1 - 1.0, 1.0, 0.0, w2 - 1.0, s};
}

std::array<double, 6> det_m4_polynomial(double w1, double w2,
                                        const std::array<double, 5>& C) {
  PirkStepper stepper(pirk_tableau(SchemeId::pirk4_custom(C)));
  auto det_at = [&](double s) {
    return det2(
        linear_update_matrix_numeric(stepper, realize_omega_pattern(w1, w2, s),
                                     1.0));
  };
  // interpolate at 6 nodes, Newton form via a small Vandermonde solve
  const std::array<double, 6> nodes = {0.0, -1.0, -2.0, -3.0, -4.0, -5.0};
  double A[6][7];
  for (int i = 0; i < 6; ++i) {
    double p = 1.0;
    for (int j = 0; j < 6; ++j) {
      A[i][j] = p;
      p *= nodes[i];
    }
    A[i][6] = det_at(nodes[i]);
  }
  for (int col = 0; col < 6; ++col) {
    int piv = col;
    for (int i = col + 1; i < 6; ++i)
      if (std::abs(A[i][col]) > std::abs(A[piv][col])) piv = i;
    for (int j = 0; j < 7; ++j) std::swap(A[col][j], A[piv][j]);
    for (int i = 0; i < 6; ++i) {
      if (i == col) continue;
      const double f = A[i][col] / A[col][col];
      for (int j = col; j < 7; ++j) A[i][j] -= f * A[col][j];
    }
  }
  std::array<double, 6> p{};
  for (int i = 0; i < 6; ++i) p[i] = A[i][6] / A[i][i];

  auto eval = [&](double s) {
    double acc = 0.0;
    for (int i = 5; i >= 0; --i) acc = acc * s + p[i];
    return acc;
  };
  for (double s : {-0.5, -1.5, -2.5, -3.5, -4.5}) {
    const double ref = det_at(s);
    const double scalej = std::max(1.0, std::abs(ref));
    if (std::abs(eval(s) - ref) > 1e-10 * scalej)
      throw ConfigError("update-matrix determinant is not a degree-5 "
                        "polynomial in lambda*alpha2");
  }
  return p;
}

namespace {

void push(ConditionReport& rep, std::string label, double margin) {
  ConditionItem it{std::move(label), margin, margin >= -1e-12};
  rep.all_ok = rep.all_ok && it.ok;
  rep.items.push_back(std::move(it));
}

}  // namespace

ConditionReport pirk2_sufficient_conditions(double c1, double c2, double s) {
  ConditionReport rep;
  push(rep, "upper bound, equal unit eigenvalues: 2C2(1-C1)-C1 <= 0",
       -(2.0 * c2 * (1.0 - c1) - c1));
  push(rep, "upper bound, opposite unit eigenvalues: 0 <= 1-2C1+2C2",
       1.0 - 2.0 * c1 + 2.0 * c2);
  push(rep,
       "lower bound, opposite unit eigenvalues (s ~ -1): "
       "0 <= 6+5C1-6C2+2C1C2",
       6.0 + 5.0 * c1 - 6.0 * c2 + 2.0 * c1 * c2);
  push(rep, "lower bound, zero eigenvalues (s ~ -1): 0 <= 4+C1-2C1C2",
       4.0 + c1 - 2.0 * c1 * c2);
  push(rep, "s-dependent: -4 <= s(1-2C1+2C2)",
       s * (1.0 - 2.0 * c1 + 2.0 * c2) + 4.0);
  push(rep, "s-dependent: -5 <= s^2(2C2-C1-2C1C2)",
       s * s * (2.0 * c2 - c1 - 2.0 * c1 * c2) + 5.0);
  return rep;
}

ConditionReport pirk3_sufficient_conditions(double c1, double c2, double s) {
  ConditionReport rep;
  const double d = c1 - 4.0 * c2;
  const double q = -1.0 + 3.0 * (1.0 - 2.0 * c1) * (c1 + 4.0 * c2);
  push(rep, "upper bound, eigenvalues (-1,-1) (s ~ -1): -20/9 <= C1-4C2",
       d + 20.0 / 9.0);
  push(rep, "upper bound, eigenvalues (1,1) (|s| << 1): C1-4C2 <= 0", -d);
  push(rep,
       "upper bound, eigenvalues (1,1) (|s| >> 1): "
       "-1+3(1-2C1)(C1+4C2) <= 0",
       -q);
  push(rep,
       "upper bound, opposite eigenvalues (s ~ -1): "
       "0 <= 73+18C1^2-180C2+9C1(3+8C2)",
       73.0 + 18.0 * c1 * c1 - 180.0 * c2 + 9.0 * c1 * (3.0 + 8.0 * c2));
  push(rep,
       "lower bound, eigenvalues (1,1) (s ~ -1): "
       "0 <= 9C1-12C2-6C1^2-24C1C2+143",
       9.0 * c1 - 12.0 * c2 - 6.0 * c1 * c1 - 24.0 * c1 * c2 + 143.0);
  push(rep,
       "lower bound, eigenvalues (-1,-1) (s ~ -1): "
       "0 <= 103-15C1-6C1^2+84C2-24C1C2",
       103.0 - 15.0 * c1 - 6.0 * c1 * c1 + 84.0 * c2 - 24.0 * c1 * c2);
  push(rep,
       "lower bound, opposite eigenvalues (s ~ -1): "
       "0 <= 6C1^2-15C1+36C2+24C1C2+71",
       6.0 * c1 * c1 - 15.0 * c1 + 36.0 * c2 + 24.0 * c1 * c2 + 71.0);
  push(rep, "s-dependent: s(-1+C1-4C2) <= 8/3",
       8.0 / 3.0 - s * (-1.0 + d));
  push(rep, "s-dependent: -24 <= s^2(C1-4C2)", s * s * d + 24.0);
  push(rep, "s-dependent: s^3[-1+3(1-2C1)(C1+4C2)] <= 48",
       48.0 - s * s * s * q);
  return rep;
}

std::array<std::complex<double>, 2> wave_eigenvalues(int order, double x,
                                                     std::span<const double> C) {
  using cplx = std::complex<double>;
  switch (order) {
    case 1: {
      const double c1 = C[0];
      const cplx rad = std::sqrt(cplx(-x * (4.0 - c1 * c1 * x), 0.0));
      return {0.5 * (2.0 - c1 * x + rad), 0.5 * (2.0 - c1 * x - rad)};
    }
    case 2: {
      const double c1 = C[0], c2 = C[1];
      const double p = c1 * (1.0 - 2.0 * c2);
      const double base = 1.0 - x / 2.0 + p / 8.0 * x * x;
      const double inner =
          -x * (64.0 - 16.0 * (1.0 + 2.0 * c1 - 2.0 * c2) * x +
                8.0 * p * x * x - p * p * x * x * x);
      const cplx rad = std::sqrt(cplx(inner, 0.0)) / 8.0;
      return {base + rad, base - rad};
    }
    case 3: {
      const double c1 = C[0], c2 = C[1];
      const double w = 1.0 + c1 - 4.0 * c2;
      const double base = 1.0 - x / 2.0 + x * x / 24.0 * w;
      const double inner =
          x * (192.0 * (x - 3.0) -
               16.0 * x * x * (3.0 * c1 * (1.0 - c1 - 4.0 * c2) + 1.0) +
               x * x * x * w * w);
      const cplx rad = std::sqrt(cplx(inner, 0.0)) / 24.0;
      return {base + rad, base - rad};
    }
    default:
      throw ConfigError("wave eigenvalues only for orders 1..3");
  }
}

WaveStability wave_stability_predicate(int order, double x,
                                       std::span<const double> C) {
  constexpr double tol = 1e-12;
  WaveStability out;
  if (x == 0.0) {
    out.eigen_stable = true;
    out.det_bounded = true;
    out.binding = "trivial (x = 0)";
    return out;
  }

  struct Named {
    const char* label;
    double margin;
  };
  std::vector<Named> eig, det;
  switch (order) {
    case 1: {
      const double c1 = C[0];
      eig.push_back({"lower eigen bound: 1 <= C1", c1 - 1.0});
      eig.push_back({"upper eigen bound: C1 <= 1/2 + 2/x",
                     0.5 + 2.0 / x - c1});
      eig.push_back({"step bound: x <= 4", 4.0 - x});
      det.push_back({"det lower: 1 <= C1", c1 - 1.0});
      det.push_back({"det upper: C1 <= 1 + 2/x", 1.0 + 2.0 / x - c1});
      break;
    }
    case 2: {
      const double c1 = C[0], c2 = C[1];
      const double p = c1 * (1.0 - 2.0 * c2);
      const double q = c1 + 2.0 * c2 * (c1 - 1.0);
      eig.push_back({"eigen: (4/x)(1-4/x) <= C1(1-2C2)",
                     p - 4.0 / x * (1.0 - 4.0 / x)});
      eig.push_back({"eigen: C1(1-2C2) <= 4/x", 4.0 / x - p});
      eig.push_back({"eigen: C1-C2 <= 2/x", 2.0 / x - (c1 - c2)});
      eig.push_back({"eigen: C2(2C1-1) <= (2/x)(-1+4/x)",
                     2.0 / x * (-1.0 + 4.0 / x) - c2 * (2.0 * c1 - 1.0)});
      eig.push_back({"eigen: 0 <= C1+2C2(C1-1)", q});
      det.push_back({"det: 0 <= C1+2C2(C1-1)", q});
      det.push_back({"det: C1+2C2(C1-1) <= 8/x^2", 8.0 / (x * x) - q});
      break;
    }
    case 3: {
      const double c1 = C[0], c2 = C[1];
      const double w = 1.0 + c1 - 4.0 * c2;
      const double r = 1.0 + 3.0 * (2.0 * c1 - 1.0) * (c1 + 4.0 * c2);
      eig.push_back({"eigen: (12/x)(1-4/x) <= 1+C1-4C2",
                     w - 12.0 / x * (1.0 - 4.0 / x)});
      eig.push_back({"eigen: 1+C1-4C2 <= 12/x", 12.0 / x - w});
      eig.push_back({"eigen: 1+3(2C1-1)(C1+4C2) <= (6/x)(12/x-1)",
                     6.0 / x * (12.0 / x - 1.0) - r});
      eig.push_back(
          {"eigen: 1+3(2C1-1)(C1+4C2) <= (6/x)[(12/x)(4/x-1)-1+2(1+C1-4C2)]",
           6.0 / x * (12.0 / x * (4.0 / x - 1.0) - 1.0 + 2.0 * w) - r});
      eig.push_back({"eigen: (6/x)(C1-4C2) <= 1+3(2C1-1)(C1+4C2)",
                     r - 6.0 / x * (c1 - 4.0 * c2)});
      det.push_back({"det: (6/x)(C1-4C2) <= 1+3(2C1-1)(C1+4C2)",
                     r - 6.0 / x * (c1 - 4.0 * c2)});
      det.push_back(
          {"det: -144 <= 6x^2(C1-4C2)+x^3[-1+3(1-2C1)(C1+4C2)]",
           6.0 * x * x * (c1 - 4.0 * c2) +
               x * x * x * (-1.0 + 3.0 * (1.0 - 2.0 * c1) * (c1 + 4.0 * c2)) +
               144.0});
      break;
    }
    default:
      throw ConfigError("wave stability predicate only for orders 1..3");
  }

  out.eigen_stable = true;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& n : eig) {
    if (n.margin < -tol) out.eigen_stable = false;
    if (n.margin < worst) {
      worst = n.margin;
      out.binding = n.label;
    }
  }
  out.det_bounded = true;
  for (const auto& n : det) {
    if (n.margin < -tol) out.det_bounded = false;
    if (!out.eigen_stable && n.margin < worst) {
      worst = n.margin;
      out.binding = n.label;
    }
  }
  return out;
}

std::vector<std::array<double, 2>> omega_patterns_3x3() {
  std::vector<std::array<double, 2>> out;
  for (double a : {0.0, 1.0, -1.0})
    for (double b : {0.0, 1.0, -1.0}) out.push_back({a, b});
  return out;
}

Pirk4Verification verify_pirk4_interval(
    const std::array<double, 5>& C, double s_min,
    std::span<const std::array<double, 2>> omega_set, int n_points) {
  Pirk4Verification res;
  n_points = std::max(n_points, 2048);
  for (const auto& w : omega_set) {
    const auto p = det_m4_polynomial(w[0], w[1], C);
    for (int i = 0; i <= n_points; ++i) {
      const double s = s_min + (0.0 - s_min) * i / n_points;
      double v = 0.0;
      for (int k = 5; k >= 0; --k) v = v * s + p[k];
      res.max_abs_det = std::max(res.max_abs_det, std::abs(v));
      if (std::abs(v) > 1.0 + 1e-9 && res.ok) {
        res.ok = false;
        res.s_fail = s;
        res.w1_fail = w[0];
        res.w2_fail = w[1];
      }
    }
  }
  return res;
}

namespace {

// max |det(M4)| over the omega patterns and s in [-eps, 0]
double pirk4_objective(const std::array<double, 5>& C, double eps,
                       int n_points) {
  double worst = 0.0;
  for (const auto& w : omega_patterns_3x3()) {
    std::array<double, 6> p;
    try {
      p = det_m4_polynomial(w[0], w[1], C);
    } catch (const ConfigError&) {
      return std::numeric_limits<double>::infinity();
    }
    for (int i = 0; i <= n_points; ++i) {
      const double s = -eps * i / n_points;
      double v = 0.0;
      for (int k = 5; k >= 0; --k) v = v * s + p[k];
      worst = std::max(worst, std::abs(v));
    }
  }
  return worst;
}

std::array<double, 5> nelder_mead(
    const std::function<double(const std::array<double, 5>&)>& f,
    std::array<double, 5> x0, double scale, int max_iter) {
  constexpr int n = 5;
  std::array<std::array<double, 5>, n + 1> pts;
  std::array<double, n + 1> fv;
  pts[0] = x0;
  for (int i = 1; i <= n; ++i) {
    pts[i] = x0;
    pts[i][i - 1] += scale;
  }
  for (int i = 0; i <= n; ++i) fv[i] = f(pts[i]);

  for (int it = 0; it < max_iter; ++it) {
    // order
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (fv[j] < fv[i]) {
          std::swap(fv[i], fv[j]);
          std::swap(pts[i], pts[j]);
        }
    if (fv[n] - fv[0] < 1e-12) break;

    std::array<double, 5> centroid{};
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < 5; ++k) centroid[k] += pts[i][k] / n;

    auto blend = [&](double t) {
      std::array<double, 5> p;
      for (int k = 0; k < 5; ++k)
        p[k] = centroid[k] + t * (centroid[k] - pts[n][k]);
      return p;
    };

    const auto xr = blend(1.0);
    const double fr = f(xr);
    if (fr < fv[0]) {
      const auto xe = blend(2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[n] = xe;
        fv[n] = fe;
      } else {
        pts[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      pts[n] = xr;
      fv[n] = fr;
    } else {
      const auto xc = blend(fr < fv[n] ? 0.5 : -0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, fv[n])) {
        pts[n] = xc;
        fv[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          for (int k = 0; k < 5; ++k)
            pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
          fv[i] = f(pts[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  return pts[best];
}

}  // namespace

std::array<double, 5> optimize_pirk4_coefficients(
    std::span<const double> epsilon_schedule,
    const std::array<double, 5>& seed) {
  std::array<double, 5> current = seed;
  for (double eps : epsilon_schedule) {
    if (eps < 0.0) throw ConfigError("epsilon schedule must be nonnegative");
    if (eps == 0.0) continue;
    auto objective = [eps](const std::array<double, 5>& C) {
      return pirk4_objective(C, eps, 256);
    };
    auto candidate = nelder_mead(objective, current, 0.02, 400);
    if (objective(candidate) > 1.0 + 1e-6)
      throw ConfigError("no feasible fourth-order coefficients at interval "
                        "half-width " +
                        std::to_string(eps));
    current = candidate;
  }
  return current;
}

RegionTable scan_stability_region(const StabilityProbe& probe,
                                  std::span<const std::vector<double>> c_grid,
                                  std::span<const double> cfl_list,
                                  double threshold) {
  RegionTable table;
  for (double cfl : cfl_list) {
    BoundaryPoint bp;
    bp.cfl = cfl;
    for (const auto& C : c_grid) {
      RegionEntry e;
      e.C = C;
      e.cfl = cfl;
      try {
        e.norm = probe(C, cfl);
      } catch (const NumericalFailure&) {
        e.norm = std::numeric_limits<double>::infinity();
      }
      e.stable = std::isfinite(e.norm) && e.norm < threshold;
      if (e.stable) {
        if (!bp.any_stable) {
          bp.c_min = bp.c_max = C[0];
          bp.any_stable = true;
        } else {
          bp.c_min = std::min(bp.c_min, C[0]);
          bp.c_max = std::max(bp.c_max, C[0]);
        }
      }
      table.entries.push_back(std::move(e));
    }
    table.boundary.push_back(bp);
  }
  return table;
}

XbarFit fit_xbar(std::span<const std::array<double, 2>> pts, int order) {
  XbarFit fit;
  if (order == 1) {
    // C1_max = p1 + p2 * (1/cfl^2), then x = xbar*cfl^2 and the upper
    // bound 1/2 + 2/x give xbar = 2/p2
    if (pts.size() < 2) throw ConfigError("need at least two boundary points");
    double sz = 0, szz = 0, sy = 0, szy = 0;
    const double n = static_cast<double>(pts.size());
    for (const auto& p : pts) {
      const double z = 1.0 / (p[0] * p[0]);
      sz += z;
      szz += z * z;
      sy += p[1];
      szy += z * p[1];
    }
    const double denom = n * szz - sz * sz;
    if (std::abs(denom) < 1e-14 * std::max(1.0, szz))
      throw ConfigError("degenerate boundary fit");
    fit.p2 = (n * szy - sz * sy) / denom;
    fit.p1 = (sy - fit.p2 * sz) / n;
    if (fit.p2 <= 0.0) throw ConfigError("boundary fit has nonpositive slope");
    fit.xbar = 2.0 / fit.p2;
    double ss = 0;
    for (const auto& p : pts) {
      const double pred = fit.p1 + fit.p2 / (p[0] * p[0]);
      ss += (p[1] - pred) * (p[1] - pred);
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
  }
  if (order == 2 || order == 3) {
    // boundary combination y = k/x with x = xbar*cfl^2
    if (pts.empty()) throw ConfigError("need boundary points");
    const double k = order == 2 ? 4.0 : 12.0;
    double szz = 0, szy = 0;
    for (const auto& p : pts) {
      const double z = k / (p[0] * p[0]);
      szz += z * z;
      szy += z * p[1];
    }
    if (szy <= 0.0) throw ConfigError("degenerate boundary fit");
    fit.xbar = szz / szy;
    double ss = 0;
    for (const auto& p : pts) {
      const double pred = k / (fit.xbar * p[0] * p[0]);
      ss += (p[1] - pred) * (p[1] - pred);
    }
    fit.rms_residual = std::sqrt(ss / pts.size());
    return fit;
  }
  throw ConfigError("boundary fit only for orders 1..3");
}

}  // namespace pirk
