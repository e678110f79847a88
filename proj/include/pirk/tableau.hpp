#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pirk {

/// Thrown when a scheme or run configuration is invalid.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Identity of a time-integration scheme.
///
/// The named schemes carry their coefficients implicitly; the Custom
/// variants carry the free coefficients of the corresponding family.
struct SchemeId {
  enum class Kind {
    Erk1,
    Erk2,
    Erk3,
    Erk4,
    Pirk1,
    Pirk1Custom,   // (C1)
    Pirk2a,
    Pirk2b,
    Pirk2Custom,   // (C1, C2)
    Pirk3a,
    Pirk3b,
    Pirk3Custom,   // (C1, C2)
    Pirk4,
    Pirk4Custom,   // (C1..C5)
    ImexSsp2_222,
    ImexSsp3_433,
  };

  Kind kind = Kind::Pirk1;
  std::array<double, 5> coeff{};  // used by the Custom variants only

  static SchemeId named(Kind k) { return SchemeId{k, {}}; }
  static SchemeId pirk1_custom(double c1);
  static SchemeId pirk2_custom(double c1, double c2);
  static SchemeId pirk3_custom(double c1, double c2);
  static SchemeId pirk4_custom(const std::array<double, 5>& c);

  /// Parses names like "pirk2b", "erk3", "imex2", "imex3".
  static std::optional<SchemeId> parse(const std::string& name);

  std::string name() const;
  int order() const;
};

/// Coefficients of a partially implicit RK scheme in the (s+1)-stage
/// IMEX layout: the explicit tableau (a, b, c) drives the u variable and
/// the L3 operator, the implicit tableau (a_tilde, b_tilde) drives L2.
///
/// Storage conventions (0-based):
///   a[i][j]        = a_{i+1, j+1}, strictly lower triangular, s x s
///   b[j], c[i]     length s, c[0] = 0
///   a_tilde[i][j]  = atil_{i+1, j+1}, lower triangular incl. diagonal,
///                    (s+1) x (s+1); row s equals b_tilde
///   b_tilde[j]     length s+1
/// The implicit abscissae coincide with the explicit ones extended by
/// c_{s+1} = 1.
struct PirkTableau {
  int stages = 0;  // s
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<std::vector<double>> a_tilde;
  std::vector<double> b_tilde;
  int order = 0;

  /// True when the implicit part is identically zero (pure ERK; the L2
  /// operator is ignored entirely by the stepper).
  bool pure_explicit() const;

  /// Abscissa of stage j = 0..s (c extended by the final level 1).
  double stage_abscissa(int j) const { return j < stages ? c[j] : 1.0; }
};

/// A general additive (IMEX) RK pair with its own implicit abscissae.
/// Used for order-condition checks and for schemes that do not fit the
/// PIRK layout (IMEX-SSP2(2,2,2) has c_tilde != c).
struct ArkTableau {
  std::vector<std::vector<double>> a_ex;
  std::vector<double> b_ex;
  std::vector<double> c_ex;
  std::vector<std::vector<double>> a_im;
  std::vector<double> b_im;
  std::vector<double> c_im;
};

/// Coefficient set of the named fourth-order scheme.
const std::array<double, 5>& pirk4_default_coefficients();

/// Optimal SSP explicit RK tableau of the given order (1..4), returned
/// with a zero implicit part.
PirkTableau erk_tableau(int order);

/// Full tableau for any scheme identity except ImexSsp2_222 (which does
/// not fit the PIRK layout; see imex_ssp2_ark and the dedicated stepper).
/// The ERKn identities return the PIRK-family tableau at the ERK
/// coefficient values, i.e. L2 is treated explicitly.
PirkTableau pirk_tableau(const SchemeId& id);

/// The IMEX-SSP2(2,2,2) pair (L-stable implicit part, gamma = 1 - 1/sqrt(2)).
ArkTableau imex_ssp2_ark();

/// Lifts a PIRK tableau into the padded additive-RK form of Table-style
/// (s+1)-stage layout: explicit part zero-padded, row s+1 = b.
ArkTableau to_ark(const PirkTableau& t);

/// One evaluated order/consistency condition.
struct OrderCondition {
  std::string label;
  double residual = 0.0;
  bool ok = false;
};

struct OrderConditionReport {
  std::vector<OrderCondition> conditions;
  bool all_ok = true;
  double max_residual = 0.0;
};

/// Evaluates the additive-RK order conditions up to `order` for the
/// separable splitting (the implicit operator depends only on the
/// explicitly evolved variable, so trees with an implicit node feeding
/// another implicit node vanish), plus the consistency conditions on row
/// sums. Pass/fail at the given tolerance.
OrderConditionReport check_order_conditions(const ArkTableau& t, int order,
                                            double tol = 1e-12);

/// Convenience overload: checks the tableau's declared order. Pure ERK
/// tableaus are checked on the explicit family only.
OrderConditionReport check_order_conditions(const PirkTableau& t,
                                            double tol = 1e-12);

}  // namespace pirk
