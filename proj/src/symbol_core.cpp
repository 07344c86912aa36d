#include "trichar/symbol_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "trichar/errors.hpp"

namespace trichar {

namespace {

std::vector<double> phase_point(const PhaseLayout& l, double t,
                                std::span<const double> x, double tau,
                                std::span<const double> xi) {
  if (x.size() != l.n || xi.size() != l.n) {
    throw InvalidInput("symbol point has dimension mismatch (expected n = " +
                       std::to_string(l.n) + ")");
  }
  std::vector<double> z(l.nvars(), 0.0);
  z[PhaseLayout::t()] = t;
  for (std::size_t j = 0; j < l.n; ++j) {
    z[l.x(j)] = x[j];
    z[l.xi(j)] = xi[j];
  }
  z[l.tau()] = tau;
  return z;
}

std::vector<std::size_t> xi_vars(const PhaseLayout& l) {
  std::vector<std::size_t> v(l.n);
  for (std::size_t j = 0; j < l.n; ++j) v[j] = l.xi(j);
  return v;
}

double norm2(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

}  // namespace

double CoefficientSpec::evaluate(double t, std::span<const double> x,
                                 std::span<const double> xi) const {
  return poly.evaluate(phase_point(layout, t, x, 0.0, xi));
}

void CoefficientSpec::validate(const std::string& name) const {
  if (poly.nvars() != layout.nvars() && !poly.is_zero()) {
    throw InvalidInput(name + ": polynomial does not match phase layout");
  }
  if (!poly.independent_of(layout.tau())) {
    throw InvalidInput(name + ": coefficient symbol must not depend on tau");
  }
  const auto vars = xi_vars(layout);
  if (!poly.homogeneous_in(vars, degree)) {
    throw InvalidInput(name + ": not homogeneous of order " +
                       std::to_string(degree) + " in xi");
  }
}

ModelOperator ModelOperator::zero(std::size_t n) {
  ModelOperator op;
  op.layout = PhaseLayout{n};
  op.a1 = CoefficientSpec(op.layout, 1);
  op.a2 = CoefficientSpec(op.layout, 2);
  op.a3 = CoefficientSpec(op.layout, 3);
  op.b = CoefficientSpec(op.layout, 2);
  op.lower.B2 = CoefficientSpec(op.layout, 2);
  op.lower.B1 = CoefficientSpec(op.layout, 1);
  op.lower.C = Polynomial(op.layout.nvars());
  return op;
}

Polynomial ModelOperator::principal_symbol() const {
  const std::size_t nv = layout.nvars();
  const Polynomial t = Polynomial::variable(nv, PhaseLayout::t());
  const Polynomial tau = Polynomial::variable(nv, layout.tau());
  Polynomial p = tau * tau * tau;
  p += t * a1.poly * tau * tau;
  p -= t * a2.poly * tau;
  p += t * t * a3.poly;
  return p;
}

Polynomial ModelOperator::second_order_part() const {
  const Polynomial tau = Polynomial::variable(layout.nvars(), layout.tau());
  Polynomial p = b.poly;
  p += lower.B2.poly;
  p += lower.B1.poly * tau;
  return p;
}

void ModelOperator::validate() const {
  if (layout.n == 0) throw InvalidInput("operator dimension must be >= 1");
  const std::pair<const CoefficientSpec*, const char*> specs[] = {
      {&a1, "a1"}, {&a2, "a2"}, {&a3, "a3"}, {&b, "b"},
      {&lower.B2, "B2"}, {&lower.B1, "B1"}};
  const int expected[] = {1, 2, 3, 2, 2, 1};
  for (std::size_t i = 0; i < std::size(specs); ++i) {
    const auto& [spec, name] = specs[i];
    if (!(spec->layout == layout)) {
      throw InvalidInput(std::string(name) + ": layout differs from operator");
    }
    if (spec->degree != expected[i]) {
      throw InvalidInput(std::string(name) + ": degree must be " +
                         std::to_string(expected[i]));
    }
    spec->validate(name);
  }
  if (!lower.C.is_zero()) {
    std::vector<std::size_t> cov(layout.n + 1);
    for (std::size_t i = 0; i <= layout.n; ++i) cov[i] = layout.covariable(i);
    if (lower.C.max_degree_in(cov) > 1) {
      throw InvalidInput("C: lower order remainder must have order <= 1");
    }
  }
  if (!(delta0 > 0)) throw InvalidInput("delta0 must be positive");
}

double ellipticity_margin(const ModelOperator& op, double t,
                          std::span<const double> x,
                          std::span<const std::vector<double>> directions) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& w : directions) {
    const double n2 = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
    worst = std::min(worst, op.a2.evaluate(t, x, w) / n2);
  }
  return worst;
}

double principal_symbol(const ModelOperator& op, double t,
                        std::span<const double> x, double tau,
                        std::span<const double> xi) {
  const double a1 = op.a1.evaluate(t, x, xi);
  const double a2 = op.a2.evaluate(t, x, xi);
  const double a3 = op.a3.evaluate(t, x, xi);
  return tau * tau * tau + t * a1 * tau * tau - t * a2 * tau + t * t * a3;
}

CubicCoefficients cubic_coefficients(const ModelOperator& op, double t,
                                     std::span<const double> x,
                                     std::span<const double> xi) {
  return CubicCoefficients{t, op.a1.evaluate(t, x, xi), op.a2.evaluate(t, x, xi),
                           op.a3.evaluate(t, x, xi)};
}

double discriminant(const CubicCoefficients& c) {
  const double t = c.t;
  const double q = (-3 * t * c.a2 - t * t * c.a1 * c.a1) / 9.0;
  const double r = (-9 * t * t * c.a1 * c.a2 - 27 * t * t * c.a3 -
                    2 * t * t * t * c.a1 * c.a1 * c.a1) /
                   54.0;
  return q * q * q + r * r;
}

DiscriminantValue discriminant(const ModelOperator& op, double t,
                               std::span<const double> x,
                               std::span<const double> xi) {
  const double nrm = norm2(xi);
  if (!(nrm > 0)) throw InvalidInput("discriminant: xi must be nonzero");
  std::vector<double> unit(xi.begin(), xi.end());
  for (double& v : unit) v /= nrm;
  DiscriminantValue out;
  out.value = discriminant(cubic_coefficients(op, t, x, unit));
  out.xi_norm = nrm;
  out.homogeneity_factor = std::pow(nrm, 6);
  return out;
}

std::array<double, 3> delta_symbols(const CubicAnalysis& a) {
  std::array<double, 3> d{};
  const double A = a.coefs.A(), B = a.coefs.B();
  for (int k = 0; k < 3; ++k) {
    const double l = a.lambda[k];
    d[k] = 3 * l * l + 2 * A * l + B;
  }
  return d;
}

namespace {

// Real root of y^3 + p y + s = 0 by Newton, then quadratic deflation.
std::array<double, 3> depressed_fallback(double p, double s) {
  double y = std::cbrt(-s);
  for (int it = 0; it < 60; ++it) {
    const double f = (y * y + p) * y + s;
    const double df = 3 * y * y + p;
    if (df == 0.0) break;
    const double step = f / df;
    y -= step;
    if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(y))) break;
  }
  // y^2 + y1 y + (y1^2 + p) = 0
  const double disc = std::max(0.0, -3 * y * y - 4 * p);
  const double sq = std::sqrt(disc);
  return {y, (-y + sq) / 2, (-y - sq) / 2};
}

}  // namespace

CubicAnalysis solve_cubic_trig(const CubicCoefficients& c, double rel_tol) {
  CubicAnalysis out;
  out.coefs = c;
  const double t = c.t;
  const double A = c.A();
  out.q = (-3 * t * c.a2 - t * t * c.a1 * c.a1) / 9.0;
  out.r = (-9 * t * t * c.a1 * c.a2 - 27 * t * t * c.a3 -
           2 * t * t * t * c.a1 * c.a1 * c.a1) /
          54.0;
  const double q3 = out.q * out.q * out.q;
  const double r2 = out.r * out.r;
  out.discriminant = q3 + r2;
  if (out.discriminant > rel_tol * (std::abs(q3) + r2)) {
    throw DiscriminantPositive(out.discriminant,
                               "t = " + std::to_string(t));
  }
  out.rho = out.q < 0 ? std::pow(-out.q, 1.5) : 0.0;
  const double shift = A / 3.0;

  if (out.rho < kRhoMin) {
    out.degenerate_flag = RootBranch::cardano_fallback;
    const auto y = depressed_fallback(3 * out.q, -2 * out.r);
    for (int k = 0; k < 3; ++k) out.lambda[k] = y[k] - shift;
    out.theta = std::numbers::pi / 2;
  } else {
    double ratio = out.r / out.rho;
    if (std::abs(ratio) > 1.0) {
      out.clamp_magnitude = std::abs(ratio) - 1.0;
      ratio = std::clamp(ratio, -1.0, 1.0);
    }
    out.theta = std::acos(ratio);
    const double m = 2.0 * std::sqrt(-out.q);  // 2 rho^{1/3}
    constexpr double third = 2.0 * std::numbers::pi / 3.0;
    for (int k = 0; k < 3; ++k) {
      out.lambda[k] = m * std::cos(out.theta / 3.0 + k * third) - shift;
    }
  }

  out.delta = delta_symbols(out);
  double resid = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double prod = (out.lambda[k] - out.lambda[(k + 1) % 3]) *
                        (out.lambda[k] - out.lambda[(k + 2) % 3]);
    resid = std::max(resid, std::abs(out.delta[k] - prod));
  }
  out.delta_identity_residual = resid;
  return out;
}

CubicAnalysis solve_cubic_trig(const ModelOperator& op, double t,
                               std::span<const double> x,
                               std::span<const double> xi, double rel_tol) {
  if (!(norm2(xi) > 0)) throw InvalidInput("solve_cubic_trig: xi must be nonzero");
  return solve_cubic_trig(cubic_coefficients(op, t, x, xi), rel_tol);
}

Lemma2Result lemma2_scan(const ModelOperator& op, std::span<const double> x,
                         double t_max, const Lemma2Grid& grid) {
  if (!(t_max > 0) || grid.t_nodes == 0 || grid.directions.empty()) {
    throw InvalidInput("lemma2_scan: need t_max > 0, t nodes and directions");
  }
  const double sqrt3_2 = std::sqrt(3.0) / 2.0;
  constexpr double kCollapse = 1e-8;
  Lemma2Result res;
  res.gamma = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= grid.t_nodes; ++k) {
    const double t = t_max * static_cast<double>(k) / grid.t_nodes;
    Lemma2Row row;
    row.t = t;
    row.min_ratio = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t d = 0; d < grid.directions.size(); ++d) {
      const auto& w = grid.directions[d];
      const auto c = cubic_coefficients(op, t, x, w);
      if (!(c.a2 > 0)) {
        ok = false;
        row.min_ratio = 0;
        row.argmin_direction = d;
        break;
      }
      CubicAnalysis an;
      try {
        an = solve_cubic_trig(c);
      } catch (const DiscriminantPositive&) {
        ok = false;
        break;
      }
      double m = std::numeric_limits<double>::infinity();
      for (double dk : an.delta) m = std::min(m, std::abs(dk));
      const double ratio = m / (t * c.a2);
      if (ratio < row.min_ratio) {
        row.min_ratio = ratio;
        row.argmin_direction = d;
      }
      row.max_cos_deviation = std::max(
          row.max_cos_deviation, std::abs(std::cos(an.theta / 3.0) - sqrt3_2));
    }
    if (!ok || !(row.min_ratio > kCollapse)) break;
    res.table.push_back(row);
    res.gamma = std::min(res.gamma, row.min_ratio);
    res.gamma1 = t;
  }
  if (res.table.empty()) {
    throw ScanFailed(
        "lemma2_scan: |delta_k| >= gamma t a2 fails at the first t node; "
        "operator is not effectively hyperbolic at t = 0");
  }
  return res;
}

double hyperbolicity_limit(const ModelOperator& op, std::span<const double> x,
                           double t_max, std::size_t t_nodes,
                           std::span<const std::vector<double>> directions) {
  double t0 = 0.0;
  for (std::size_t k = 1; k <= t_nodes; ++k) {
    const double t = t_max * static_cast<double>(k) / t_nodes;
    for (const auto& w : directions) {
      const auto c = cubic_coefficients(op, t, x, w);
      const double q = (-3 * t * c.a2 - t * t * c.a1 * c.a1) / 9.0;
      const double r = (-9 * t * t * c.a1 * c.a2 - 27 * t * t * c.a3 -
                        2 * t * t * t * c.a1 * c.a1 * c.a1) /
                       54.0;
      const double d = q * q * q + r * r;
      if (d > kDiscriminantRelTol * (std::abs(q * q * q) + r * r)) return t0;
    }
    t0 = t;
  }
  return t0;
}

double weight_f(double t, double a) { return t + std::pow(1.0 + a, -1.0 / 3.0); }

double weight_f(const ModelOperator& op, double t, std::span<const double> xi) {
  const std::vector<double> x(op.dim(), 0.0);
  return weight_f(t, op.a2.evaluate(t, x, xi));
}

double weight_power(double t, double a, double p) {
  return std::pow(weight_f(t, a), p);
}

double weight_power(const ModelOperator& op, double t,
                    std::span<const double> xi, double p) {
  return std::pow(weight_f(op, t, xi), p);
}

AlphaResult weight_inequality_alpha(const AlphaGrid& grid, double tol) {
  AlphaResult res;
  res.alpha = std::numeric_limits<double>::infinity();
  for (double t : grid.t_values) {
    for (double a : grid.a_values) {
      const double inv = 1.0 / (1.0 + a);
      const double f = weight_f(t, a);
      const double f3 = f * f * f;
      const double lhs = inv + t * f * f;
      const double ratio = lhs / f3;
      if (ratio < res.alpha) {
        res.alpha = ratio;
        res.argmin_t = t;
        res.argmin_a = a;
      }
      if (lhs - f3 / 3.0 < -tol * lhs) ++res.violations_third;
      const double finv = 1.0 / f;
      const double upper = std::cbrt(1.0 + a);
      if (finv > upper * (1.0 + tol)) ++res.f_upper_violations;
      if (t < 1.0 && finv < 0.5 * (1.0 - tol)) ++res.f_lower_violations;
      ++res.nodes;
    }
  }
  return res;
}

std::vector<double> a2_values(const ModelOperator& op,
                              std::span<const std::vector<double>> xis) {
  std::vector<double> out;
  out.reserve(xis.size());
  const std::vector<double> x(op.dim(), 0.0);
  for (const auto& xi : xis) out.push_back(op.a2.evaluate(0.0, x, xi));
  return out;
}

double weight_consequence_violation(const AlphaGrid& grid, double alpha,
                                    int N) {
  double worst = -std::numeric_limits<double>::infinity();
  for (double t : grid.t_values) {
    for (double a : grid.a_values) {
      const double f = weight_f(t, a);
      const double lhs = alpha * std::pow(f, -2.0 * N) * a;
      const double rhs =
          t * a * std::pow(f, -2.0 * N - 1) + std::pow(f, -2.0 * N - 3);
      worst = std::max(worst, (lhs - rhs) / rhs);
    }
  }
  return worst;
}

}  // namespace trichar
