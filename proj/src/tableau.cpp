#include "pirk/tableau.hpp"

#include <cmath>
#include <cstdlib>

namespace pirk {

namespace {

// SSPRK(5,4) explicit Butcher coefficients.
constexpr double kA21 = 0.391752226571890;
constexpr double kA31 = 0.217669096261169;
constexpr double kA32 = 0.368410593050371;
constexpr double kA41 = 0.0826920866578107;
constexpr double kA42 = 0.139958502191895;
constexpr double kA43 = 0.251891774271694;
constexpr double kA51 = 0.0679662836371149;
constexpr double kA52 = 0.115034698504631;
constexpr double kA53 = 0.207034898597386;
constexpr double kA54 = 0.544974750228521;
constexpr double kB1 = 0.146811876084787;
constexpr double kB2 = 0.248482909444976;
constexpr double kB3 = 0.104258830331981;
constexpr double kB4 = 0.274438900901351;
constexpr double kB5 = 0.226007483236906;

// Optimized PIRK4 free coefficients.
constexpr std::array<double, 5> kPirk4C = {
    0.13761208339219633, 0.2042433556378285, 0.0904666765339173,
    0.3966145239174311, -0.00984245655482246};

void require_finite(const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(v[i])) throw ConfigError("non-finite scheme coefficient");
  }
}

std::vector<std::vector<double>> zeros(int rows, int cols) {
  return std::vector<std::vector<double>>(rows, std::vector<double>(cols, 0.0));
}

PirkTableau erk_butcher(int order) {
  PirkTableau t;
  t.order = order;
  switch (order) {
    case 1:
      t.stages = 1;
      t.a = zeros(1, 1);
      t.b = {1.0};
      t.c = {0.0};
      break;
    case 2:
      t.stages = 2;
      t.a = zeros(2, 2);
      t.a[1][0] = 1.0;
      t.b = {0.5, 0.5};
      t.c = {0.0, 1.0};
      break;
    case 3:
      t.stages = 3;
      t.a = zeros(3, 3);
      t.a[1][0] = 1.0;
      t.a[2][0] = 0.25;
      t.a[2][1] = 0.25;
      t.b = {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0};
      t.c = {0.0, 1.0, 0.5};
      break;
    case 4:
      t.stages = 5;
      t.a = zeros(5, 5);
      t.a[1][0] = kA21;
      t.a[2][0] = kA31;
      t.a[2][1] = kA32;
      t.a[3][0] = kA41;
      t.a[3][1] = kA42;
      t.a[3][2] = kA43;
      t.a[4][0] = kA51;
      t.a[4][1] = kA52;
      t.a[4][2] = kA53;
      t.a[4][3] = kA54;
      t.b = {kB1, kB2, kB3, kB4, kB5};
      t.c = {0.0, kA21, kA31 + kA32, kA41 + kA42 + kA43,
             kA51 + kA52 + kA53 + kA54};
      break;
    default:
      throw ConfigError("ERK order must be 1..4");
  }
  return t;
}

PirkTableau pirk1_family(double c1) {
  PirkTableau t = erk_butcher(1);
  t.a_tilde = zeros(2, 2);
  t.b_tilde = {1.0 - c1, c1};
  t.a_tilde[1] = t.b_tilde;
  return t;
}

PirkTableau pirk2_family(double c1, double c2) {
  PirkTableau t = erk_butcher(2);
  t.a_tilde = zeros(3, 3);
  t.a_tilde[1] = {1.0 - c1, c1, 0.0};
  t.b_tilde = {0.5, c2, 0.5 - c2};
  t.a_tilde[2] = t.b_tilde;
  return t;
}

PirkTableau pirk3_family(double c1, double c2) {
  PirkTableau t = erk_butcher(3);
  t.a_tilde = zeros(4, 4);
  t.a_tilde[1] = {1.0 - c1, c1, 0.0, 0.0};
  t.a_tilde[2] = {0.5 * (c1 + 2.0 * c2), c2, 0.5 * (1.0 - c1 - 4.0 * c2), 0.0};
  t.b_tilde = {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 0.0};
  t.a_tilde[3] = t.b_tilde;
  return t;
}

// The off-diagonal entries of the implicit tableau are fixed, given the
// free coefficients C1..C5, by the row-sum consistency and the coupled
// order-4 conditions.  All of these are affine in the unknown entries
// (A_im applied to the all-ones vector always reduces to c), so we
// assemble the small linear system and solve it by least squares.
PirkTableau pirk4_family(const std::array<double, 5>& C) {
  PirkTableau t = erk_butcher(4);
  t.a_tilde = zeros(6, 6);
  t.a_tilde[1][1] = C[0];
  t.a_tilde[2][2] = C[1];
  t.a_tilde[3][3] = C[2];
  t.a_tilde[4][2] = C[3];
  t.a_tilde[4][4] = C[4];
  t.b_tilde = {kB1, kB2, kB3, kB4, kB5, 0.0};
  t.a_tilde[5] = t.b_tilde;

  // Unknown slots (row, col) of a_tilde.
  static constexpr std::array<std::pair<int, int>, 9> slots = {
      {{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}, {4, 0}, {4, 1}, {4, 3}}};

  std::vector<double> c6(6), bex(6, 0.0);
  for (int i = 0; i < 6; ++i) c6[i] = t.stage_abscissa(i);
  for (int j = 0; j < 5; ++j) bex[j] = t.b[j];
  auto aex = zeros(6, 6);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < i; ++j) aex[i][j] = t.a[i][j];
  for (int j = 0; j < 5; ++j) aex[5][j] = t.b[j];

  auto residuals = [&](const std::vector<std::vector<double>>& A) {
    auto dot = [](const std::vector<double>& x, const std::vector<double>& y) {
      double s = 0;
      for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
      return s;
    };
    auto mat = [](const std::vector<std::vector<double>>& M,
                  const std::vector<double>& x) {
      std::vector<double> r(x.size(), 0.0);
      for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) r[i] += M[i][j] * x[j];
      return r;
    };
    std::vector<double> c2(6);
    for (int i = 0; i < 6; ++i) c2[i] = c6[i] * c6[i];
    const auto Ac = mat(A, c6);
    const auto AexC = mat(aex, c6);
    std::vector<double> r;
    for (int i = 1; i <= 4; ++i) {
      double s = 0;
      for (int j = 0; j < 6; ++j) s += A[i][j];
      r.push_back(s - c6[i]);
    }
    r.push_back(dot(bex, Ac) - 1.0 / 6.0);
    {
      double s = 0;
      for (int i = 0; i < 6; ++i) s += bex[i] * Ac[i] * c6[i];
      r.push_back(s - 1.0 / 8.0);
    }
    r.push_back(dot(bex, mat(A, c2)) - 1.0 / 12.0);
    r.push_back(dot(bex, mat(A, AexC)) - 1.0 / 24.0);
    r.push_back(dot(bex, mat(aex, Ac)) - 1.0 / 24.0);
    r.push_back(dot(t.b_tilde, mat(aex, Ac)) - 1.0 / 24.0);
    return r;
  };

  const auto r0 = residuals(t.a_tilde);
  const int m = static_cast<int>(r0.size());
  const int n = static_cast<int>(slots.size());
  auto J = zeros(m, n);
  for (int k = 0; k < n; ++k) {
    auto A = t.a_tilde;
    A[slots[k].first][slots[k].second] = 1.0;
    const auto rk = residuals(A);
    for (int i = 0; i < m; ++i) J[i][k] = rk[i] - r0[i];
  }

  // Normal equations, solved with partial pivoting.
  auto G = zeros(n, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < m; ++k) G[i][j] += J[k][i] * J[k][j];
    for (int k = 0; k < m; ++k) G[i][n] -= J[k][i] * r0[k];
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i)
      if (std::abs(G[i][col]) > std::abs(G[piv][col])) piv = i;
    std::swap(G[col], G[piv]);
    if (std::abs(G[col][col]) < 1e-14)
      throw ConfigError("degenerate fourth-order family coefficients");
    for (int i = 0; i < n; ++i) {
      if (i == col) continue;
      const double f = G[i][col] / G[col][col];
      for (int j = col; j <= n; ++j) G[i][j] -= f * G[col][j];
    }
  }
  for (int k = 0; k < n; ++k)
    t.a_tilde[slots[k].first][slots[k].second] = G[k][n] / G[k][k];

  double worst = 0;
  for (double r : residuals(t.a_tilde)) worst = std::max(worst, std::abs(r));
  if (worst > 1e-10)
    throw ConfigError("fourth-order coupling conditions are unsatisfiable");
  return t;
}

}  // namespace

SchemeId SchemeId::pirk1_custom(double c1) {
  SchemeId id{Kind::Pirk1Custom, {c1, 0, 0, 0, 0}};
  require_finite(id.coeff.data(), 1);
  return id;
}

SchemeId SchemeId::pirk2_custom(double c1, double c2) {
  SchemeId id{Kind::Pirk2Custom, {c1, c2, 0, 0, 0}};
  require_finite(id.coeff.data(), 2);
  return id;
}

SchemeId SchemeId::pirk3_custom(double c1, double c2) {
  SchemeId id{Kind::Pirk3Custom, {c1, c2, 0, 0, 0}};
  require_finite(id.coeff.data(), 2);
  return id;
}

SchemeId SchemeId::pirk4_custom(const std::array<double, 5>& c) {
  SchemeId id{Kind::Pirk4Custom, c};
  require_finite(id.coeff.data(), 5);
  return id;
}

std::optional<SchemeId> SchemeId::parse(const std::string& name) {
  using K = Kind;
  if (name == "erk1") return named(K::Erk1);
  if (name == "erk2") return named(K::Erk2);
  if (name == "erk3") return named(K::Erk3);
  if (name == "erk4") return named(K::Erk4);
  if (name == "pirk1") return named(K::Pirk1);
  if (name == "pirk2a") return named(K::Pirk2a);
  if (name == "pirk2b") return named(K::Pirk2b);
  if (name == "pirk3a") return named(K::Pirk3a);
  if (name == "pirk3b") return named(K::Pirk3b);
  if (name == "pirk4") return named(K::Pirk4);
  if (name == "imex2" || name == "imex-ssp2") return named(K::ImexSsp2_222);
  if (name == "imex3" || name == "imex-ssp3") return named(K::ImexSsp3_433);
  // Custom families: "pirk1:C1", "pirk2:C1,C2", "pirk3:C1,C2",
  // "pirk4:C1,...,C5".
  auto colon = name.find(':');
  if (colon != std::string::npos) {
    const std::string fam = name.substr(0, colon);
    std::vector<double> vals;
    std::size_t pos = colon + 1;
    while (pos <= name.size()) {
      auto comma = name.find(',', pos);
      const std::string tok =
          name.substr(pos, comma == std::string::npos ? std::string::npos
                                                      : comma - pos);
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') return std::nullopt;
      vals.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (fam == "pirk1" && vals.size() == 1) return pirk1_custom(vals[0]);
    if (fam == "pirk2" && vals.size() == 2)
      return pirk2_custom(vals[0], vals[1]);
    if (fam == "pirk3" && vals.size() == 2)
      return pirk3_custom(vals[0], vals[1]);
    if (fam == "pirk4" && vals.size() == 5)
      return pirk4_custom({vals[0], vals[1], vals[2], vals[3], vals[4]});
    return std::nullopt;
  }
  return std::nullopt;
}

std::string SchemeId::name() const {
  switch (kind) {
    case Kind::Erk1: return "erk1";
    case Kind::Erk2: return "erk2";
    case Kind::Erk3: return "erk3";
    case Kind::Erk4: return "erk4";
    case Kind::Pirk1: return "pirk1";
    case Kind::Pirk1Custom: return "pirk1:" + std::to_string(coeff[0]);
    case Kind::Pirk2a: return "pirk2a";
    case Kind::Pirk2b: return "pirk2b";
    case Kind::Pirk2Custom:
      return "pirk2:" + std::to_string(coeff[0]) + "," + std::to_string(coeff[1]);
    case Kind::Pirk3a: return "pirk3a";
    case Kind::Pirk3b: return "pirk3b";
    case Kind::Pirk3Custom:
      return "pirk3:" + std::to_string(coeff[0]) + "," + std::to_string(coeff[1]);
    case Kind::Pirk4: return "pirk4";
    case Kind::Pirk4Custom: return "pirk4:custom";
    case Kind::ImexSsp2_222: return "imex2";
    case Kind::ImexSsp3_433: return "imex3";
  }
  return "?";
}

int SchemeId::order() const {
  switch (kind) {
    case Kind::Erk1:
    case Kind::Pirk1:
    case Kind::Pirk1Custom: return 1;
    case Kind::Erk2:
    case Kind::Pirk2a:
    case Kind::Pirk2b:
    case Kind::Pirk2Custom:
    case Kind::ImexSsp2_222: return 2;
    case Kind::Erk3:
    case Kind::Pirk3a:
    case Kind::Pirk3b:
    case Kind::Pirk3Custom:
    case Kind::ImexSsp3_433: return 3;
    case Kind::Erk4:
    case Kind::Pirk4:
    case Kind::Pirk4Custom: return 4;
  }
  return 0;
}

bool PirkTableau::pure_explicit() const {
  for (const auto& row : a_tilde)
    for (double v : row)
      if (v != 0.0) return false;
  for (double v : b_tilde)
    if (v != 0.0) return false;
  return true;
}

const std::array<double, 5>& pirk4_default_coefficients() { return kPirk4C; }

PirkTableau erk_tableau(int order) {
  PirkTableau t = erk_butcher(order);
  t.a_tilde = zeros(t.stages + 1, t.stages + 1);
  t.b_tilde.assign(t.stages + 1, 0.0);
  return t;
}

PirkTableau pirk_tableau(const SchemeId& id) {
  using K = SchemeId::Kind;
  const double sq2 = std::sqrt(2.0);
  const double sq3 = std::sqrt(3.0);
  switch (id.kind) {
    case K::Erk1: return pirk1_family(0.0);
    case K::Pirk1: return pirk1_family(1.0);
    case K::Pirk1Custom: return pirk1_family(id.coeff[0]);
    case K::Erk2: return pirk2_family(0.0, 0.5);
    case K::Pirk2a: return pirk2_family(0.5, 0.0);
    case K::Pirk2b: return pirk2_family(1.0 - sq2 / 2.0, (sq2 - 1.0) / 2.0);
    case K::Pirk2Custom: return pirk2_family(id.coeff[0], id.coeff[1]);
    case K::Erk3: return pirk3_family(0.0, 0.25);
    case K::Pirk3a: return pirk3_family(0.25, 1.0 / 16.0);
    case K::Pirk3b:
      return pirk3_family((3.0 - sq3) / 6.0, (-1.0 + sq3) / 8.0);
    case K::Pirk3Custom: return pirk3_family(id.coeff[0], id.coeff[1]);
    case K::ImexSsp3_433: {
      const double c1 = 0.24169426078821;
      return pirk3_family(c1, (1.0 - 3.0 * c1) / 4.0);
    }
    case K::Erk4: return pirk4_family({0.0, 0.0, 0.0, kA53, 0.0});
    case K::Pirk4: return pirk4_family(kPirk4C);
    case K::Pirk4Custom: return pirk4_family(id.coeff);
    case K::ImexSsp2_222:
      throw ConfigError(
          "imex2 does not fit the PIRK tableau layout; use imex_ssp2_ark() "
          "or the dedicated stepper");
  }
  throw ConfigError("unknown scheme");
}

ArkTableau imex_ssp2_ark() {
  const double g = 1.0 - 1.0 / std::sqrt(2.0);
  ArkTableau t;
  t.a_ex = {{0, 0}, {1, 0}};
  t.b_ex = {0.5, 0.5};
  t.c_ex = {0.0, 1.0};
  t.a_im = {{g, 0}, {1.0 - 2.0 * g, g}};
  t.b_im = {0.5, 0.5};
  t.c_im = {g, 1.0 - g};
  return t;
}

ArkTableau to_ark(const PirkTableau& t) {
  const int s = t.stages;
  ArkTableau a;
  a.a_ex = zeros(s + 1, s + 1);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < i; ++j) a.a_ex[i][j] = t.a[i][j];
  for (int j = 0; j < s; ++j) a.a_ex[s][j] = t.b[j];
  a.b_ex.assign(s + 1, 0.0);
  for (int j = 0; j < s; ++j) a.b_ex[j] = t.b[j];
  a.c_ex = t.c;
  a.c_ex.push_back(1.0);
  a.a_im = t.a_tilde;
  a.b_im = t.b_tilde;
  a.c_im = a.c_ex;
  return a;
}

namespace {

// Rooted-tree shapes up to order 4, as nested child lists; gamma is the
// density of the tree (the order condition is Phi = 1/gamma).
struct TreeShape {
  std::string name;
  std::vector<int> parent;  // parent[k] of node k; node 0 is the root
  double gamma;
};

const std::vector<TreeShape>& tree_shapes() {
  static const std::vector<TreeShape> shapes = {
      {"t", {-1}, 1.0},
      {"[t]", {-1, 0}, 2.0},
      {"[t,t]", {-1, 0, 0}, 3.0},
      {"[[t]]", {-1, 0, 1}, 6.0},
      {"[t,t,t]", {-1, 0, 0, 0}, 4.0},
      {"[[t],t]", {-1, 0, 1, 0}, 8.0},
      {"[[t,t]]", {-1, 0, 1, 1}, 12.0},
      {"[[[t]]]", {-1, 0, 1, 2}, 24.0},
  };
  return shapes;
}

int tree_order(const TreeShape& s) { return static_cast<int>(s.parent.size()); }

// Evaluates Phi for one labeled tree (labels: 0 = explicit, 1 = implicit).
double phi(const ArkTableau& t, const TreeShape& shape,
           const std::vector<int>& labels) {
  const std::size_t n = t.b_ex.size();
  const int m = tree_order(shape);
  // w[k][i]: product over children of node k of (A^{label(child)} w_child)_i.
  std::vector<std::vector<double>> w(m, std::vector<double>(n, 1.0));
  for (int k = m - 1; k >= 1; --k) {
    const auto& A = labels[k] == 0 ? t.a_ex : t.a_im;
    const int p = shape.parent[k];
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += A[i][j] * w[k][j];
      w[p][i] *= acc;
    }
  }
  const auto& b = labels[0] == 0 ? t.b_ex : t.b_im;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += b[i] * w[0][i];
  return acc;
}

bool has_implicit_chain(const TreeShape& shape, const std::vector<int>& labels) {
  for (std::size_t k = 1; k < labels.size(); ++k)
    if (labels[k] == 1 && labels[shape.parent[k]] == 1) return true;
  return false;
}

}  // namespace

OrderConditionReport check_order_conditions(const ArkTableau& t, int order,
                                            double tol) {
  OrderConditionReport rep;
  auto add = [&](const std::string& label, double residual) {
    OrderCondition c{label, residual, std::abs(residual) <= tol};
    rep.max_residual = std::max(rep.max_residual, std::abs(residual));
    rep.all_ok = rep.all_ok && c.ok;
    rep.conditions.push_back(std::move(c));
  };

  const std::size_t n = t.b_ex.size();
  // Row-sum consistency for both families.
  for (std::size_t i = 0; i < n; ++i) {
    double se = 0.0, si = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      se += t.a_ex[i][j];
      si += t.a_im[i][j];
    }
    add("rowsum_ex[" + std::to_string(i) + "]", se - t.c_ex[i]);
    add("rowsum_im[" + std::to_string(i) + "]", si - t.c_im[i]);
  }

  for (const auto& shape : tree_shapes()) {
    const int m = tree_order(shape);
    if (m > order) continue;
    // All 0/1 labelings; skip trees with an implicit->implicit edge
    // (their elementary differential vanishes for the separable split).
    for (int mask = 0; mask < (1 << m); ++mask) {
      std::vector<int> labels(m);
      for (int k = 0; k < m; ++k) labels[k] = (mask >> k) & 1;
      if (has_implicit_chain(shape, labels)) continue;
      std::string label = shape.name + ":";
      for (int k = 0; k < m; ++k) label += labels[k] ? 'i' : 'e';
      add(label, phi(t, shape, labels) - 1.0 / shape.gamma);
    }
  }
  return rep;
}

OrderConditionReport check_order_conditions(const PirkTableau& t, double tol) {
  if (t.pure_explicit()) {
    // Check the explicit Butcher tableau alone.
    ArkTableau a;
    a.a_ex = t.a;
    a.b_ex = t.b;
    a.c_ex = t.c;
    a.a_im = a.a_ex;
    a.b_im = a.b_ex;
    a.c_im = a.c_ex;
    return check_order_conditions(a, t.order, tol);
  }
  return check_order_conditions(to_ark(t), t.order, tol);
}

}  // namespace pirk
