#pragma once

namespace pirk {

/// Rates of the linear model problem
///   u' = a1*u + a2*v
///   v' = (g1 + l)*u + g2*v
/// where the l*u part is the implicitly treated operator and g1*u + g2*v
/// the explicitly treated one.
struct LinearizedCoefficients {
  double alpha1_bar = 0.0;
  double alpha2_bar = 0.0;
  double gamma1_bar = 0.0;
  double gamma2_bar = 0.0;
  double lambda_bar = 0.0;
};

/// The same coefficients scaled by a step size (dimensionless).
struct ScaledCoefficients {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double lambda = 0.0;

  double s_param() const { return lambda * alpha2; }
};

inline ScaledCoefficients scale(const LinearizedCoefficients& c, double dt) {
  return {c.alpha1_bar * dt, c.alpha2_bar * dt, c.gamma1_bar * dt,
          c.gamma2_bar * dt, c.lambda_bar * dt};
}

}  // namespace pirk
