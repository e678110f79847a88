#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pirk/engine.hpp"
#include "pirk/linear_system.hpp"
#include "pirk/tableau.hpp"

namespace pirk {

enum class SystemClass { NotWaveLike, WaveLike, SeparableWaveLike };

struct Classification {
  SystemClass cls = SystemClass::NotWaveLike;
  std::complex<double> sigma_plus;
  std::complex<double> sigma_minus;
};

/// Classifies the linear model problem by the eigenvalues of its
/// coefficient matrix: wave-like iff they form a strictly complex
/// conjugate pair, separable additionally iff alpha2_bar*lambda_bar < 0.
Classification classify_system(const LinearizedCoefficients& c);

/// Stability matrix of the explicit part, [[1+a1, a2],[g1, 1+g2]].
Mat2 explicit_matrix(const ScaledCoefficients& c);

double det2(const Mat2& m);
double trace2(const Mat2& m);
std::array<std::complex<double>, 2> eig2(const Mat2& m);
double spectral_radius(const Mat2& m);

/// Signed determinant/trace of the explicit stability matrix plus the
/// derived K bounds. dex and trex are SIGNED here (the bound statements
/// in the source conditions use |dex| <= 1, |trex| <= 2, but every
/// closed-form determinant below takes the signed values).
struct ExplicitSpectrum {
  std::complex<double> omega1;
  std::complex<double> omega2;
  double dex = 0.0;
  double trex = 0.0;
  double k1 = 0.0;  // (1-dex)^2 + trex^2, in [1,4] for |omega|<=1
  double k2 = 0.0;  // 1 - dex, in [0,2]
  double k3 = 0.0;  // cubic combination, in [-12,36]
  double k4 = 0.0;  // (dex-2)^2 + (trex-1)^2 - 2, in [0,8]
  double s_param = 0.0;  // lambda*alpha2 (<= 0 for separable systems)
  double x = 0.0;        // -s_param
};

ExplicitSpectrum explicit_spectrum(const ScaledCoefficients& c);

/// K combinations from signed dex/trex.
double k1_of(double dex, double trex);
double k2_of(double dex, double trex);
double k3_of(double dex, double trex);
double k4_of(double dex, double trex);

struct StabilityVerdict {
  double spectral_radius = 0.0;
  double det_value = 0.0;
  bool eigen_stable = false;
  bool det_bounded = false;
};

StabilityVerdict verdict_of(const Mat2& m, double tol = 1e-12);

/// Closed-form one-step update matrix of the order-1..3 schemes on the
/// linear model problem. C holds (C1) / (C1,C2).
Mat2 m_matrix_closed(int order, const ScaledCoefficients& c,
                     std::span<const double> C);

/// Closed-form determinant of the update matrix as a polynomial in
/// s = lambda*alpha2, taking the SIGNED explicit determinant and trace.
double det_m(int order, double dex, double trex, double s_param,
             std::span<const double> C);

/// Determinant of the fourth-order update matrix, computed numerically
/// from the engine (no closed form).
double det_m4(const ScaledCoefficients& c, const std::array<double, 5>& C);

/// Coefficients p[0..5] of det(M4) as a polynomial in s = lambda*alpha2
/// for the explicit matrix realizing eigenvalues (w1, w2). Fitted at 6
/// nodes and cross-checked at independent nodes; throws ConfigError if
/// the dependence is not degree-5 polynomial to 1e-10.
std::array<double, 6> det_m4_polynomial(double w1, double w2,
                                        const std::array<double, 5>& C);

/// Explicit-part coefficients whose stability matrix has eigenvalues
/// (w1, w2): alpha1 = w1-1, gamma2 = w2-1, gamma1 = 0, alpha2 = 1, so
/// lambda alone carries s.
LinearizedCoefficients realize_omega_pattern(double w1, double w2, double s);

struct ConditionItem {
  std::string label;
  double margin = 0.0;  // >= 0 means satisfied
  bool ok = false;
};

struct ConditionReport {
  std::vector<ConditionItem> items;
  bool all_ok = true;
};

/// The four s-independent and two s-dependent sufficient conditions for
/// |det(M2)| <= 1 over the omega patterns, with their derivation case
/// labels.
ConditionReport pirk2_sufficient_conditions(double c1, double c2,
                                            double s_param);

/// The six s-independent and three s-dependent sufficient conditions
/// for |det(M3)| <= 1.
ConditionReport pirk3_sufficient_conditions(double c1, double c2,
                                            double s_param);

/// Eigenvalues of the update matrix specialized to the undamped wave
/// system (dex = 1, trex = 2, s = -x), closed forms per order.
std::array<std::complex<double>, 2> wave_eigenvalues(int order, double x,
                                                     std::span<const double> C);

struct WaveStability {
  bool eigen_stable = false;
  bool det_bounded = false;
  std::string binding;  // label of the violated (or tightest) constraint
};

WaveStability wave_stability_predicate(int order, double x,
                                       std::span<const double> C);

struct Pirk4Verification {
  bool ok = true;
  double max_abs_det = 0.0;
  // first violation, when !ok
  double s_fail = 0.0;
  double w1_fail = 0.0;
  double w2_fail = 0.0;
};

/// Checks |det(M4)| <= 1 over s in [s_min, 0] (>= 2048 grid points) for
/// each explicit-part eigenvalue pattern in omega_set.
Pirk4Verification verify_pirk4_interval(
    const std::array<double, 5>& C, double s_min,
    std::span<const std::array<double, 2>> omega_set, int n_points = 2048);

/// All nine (w1, w2) patterns with w in {0, +1, -1}.
std::vector<std::array<double, 2>> omega_patterns_3x3();

/// Continuation loop: for each epsilon in the schedule, minimizes
/// max_{omega, s in [-eps, 0]} |det(M4)| by a derivative-free simplex
/// search seeded at the previous optimum.
std::array<double, 5> optimize_pirk4_coefficients(
    std::span<const double> epsilon_schedule,
    const std::array<double, 5>& seed);

/// One scan sample: a scheme-coefficient point and a CFL factor,
/// labelled stable iff the experiment's error norm stayed below the
/// instability threshold at the verdict time.
struct RegionEntry {
  std::vector<double> C;
  double cfl = 0.0;
  double norm = 0.0;
  bool stable = false;
};

struct BoundaryPoint {
  double cfl = 0.0;
  double c_min = 0.0;
  double c_max = 0.0;
  bool any_stable = false;
};

struct RegionTable {
  std::vector<RegionEntry> entries;
  std::vector<BoundaryPoint> boundary;  // per CFL, along the first C axis
};

/// Probe runs one experiment and returns its error norm at the verdict
/// time (infinity on blow-up).
using StabilityProbe =
    std::function<double(std::span<const double> C, double cfl)>;

RegionTable scan_stability_region(const StabilityProbe& probe,
                                  std::span<const std::vector<double>> c_grid,
                                  std::span<const double> cfl_list,
                                  double threshold = 1.0);

struct XbarFit {
  double xbar = 0.0;
  double p1 = 0.0;  // order-1 model intercept
  double p2 = 0.0;  // order-1 model slope in 1/cfl^2
  double rms_residual = 0.0;
};

/// Fits the analytic stability-boundary family to measured boundary
/// points (cfl, boundary value). Order 1: C1_max = p1 + p2/cfl^2 and
/// xbar = 2/p2. Orders 2 and 3: one-parameter fit y = k/(xbar*cfl^2)
/// with k = 4 resp. 12, where y is the boundary combination
/// C1(1-2C2) resp. 1+C1-4C2.
XbarFit fit_xbar(std::span<const std::array<double, 2>> boundary_points,
                 int order);

}  // namespace pirk
