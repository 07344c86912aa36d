#include "trichar/scaling_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "trichar/errors.hpp"
#include "trichar/grids.hpp"

namespace trichar {

Rational::Rational(long n, long d) {
  if (d == 0) throw InvalidInput("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const long g = std::gcd(n, d);
  num = g ? n / g : 0;
  den = g ? d / g : 1;
}

std::string Rational::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }

double ScalingTransform::pow(Rational e) const {
  if (e.num == 0) return 1.0;
  if (e.den == 3) return std::pow(std::cbrt(epsilon), static_cast<double>(e.num));
  return std::pow(epsilon, e.value());
}

Rational monomial_prefactor(int t_power, int tau_power, int xi_degree) {
  return Rational(2) + Rational(2 * t_power, 3) - Rational(2 * tau_power, 3) -
         Rational(xi_degree);
}

const RescaledTerm& RescaledOperator::term(const std::string& name) const {
  for (const auto& t : terms) {
    if (t.name == name) return t;
  }
  throw InvalidInput("no rescaled term named " + name);
}

std::vector<std::pair<Rational, std::vector<std::string>>> RescaledOperator::groups() const {
  std::vector<std::pair<Rational, std::vector<std::string>>> out;
  for (const auto& t : terms) {
    auto it = std::find_if(out.begin(), out.end(), [&](auto& g) { return g.first == t.prefactor; });
    if (it == out.end()) {
      out.push_back({t.prefactor, {t.name}});
    } else {
      it->second.push_back(t.name);
    }
  }
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.first < b.first; });
  return out;
}

namespace {

// eps^2 * (t^tr tau^ur coef)(eps^{2/3} s, eps y, eps^{-2/3} sigma, eps^{-1} eta)
// divided by eps^{prefactor} and by the role powers s^tr sigma^ur.
Polynomial rescale_coefficient(const Polynomial& p, const PhaseLayout& l,
                               const ScalingTransform& tf, int t_role, int tau_role,
                               Rational prefactor) {
  Polynomial out(p.nvars());
  for (const auto& [e, c] : p.terms()) {
    int xs = 0, xis = 0;
    for (std::size_t j = 0; j < l.n; ++j) {
      xs += e[l.x(j)];
      xis += e[l.xi(j)];
    }
    const Rational E = monomial_prefactor(t_role + e[l.t()], tau_role + e[l.tau()], xis) +
                       Rational(xs);
    out.add_term(e, c * tf.pow(E - prefactor));
  }
  return out;
}

}  // namespace

RescaledOperator rescale_operator(const ModelOperator& op, double epsilon) {
  if (!(epsilon > 0 && epsilon <= 1)) throw InvalidInput("epsilon must lie in (0, 1]");
  RescaledOperator r;
  r.transform.epsilon = epsilon;
  const auto& l = op.layout;
  const auto& tf = r.transform;
  r.op = op;

  struct Role {
    const char* name;
    const CoefficientSpec* spec;
    CoefficientSpec* target;
    int t_role, tau_role;
  };
  const Role roles[] = {
      {"a1", &op.a1, &r.op.a1, 1, 2},           {"a2", &op.a2, &r.op.a2, 1, 1},
      {"a3", &op.a3, &r.op.a3, 2, 0},           {"b", &op.b, &r.op.b, 0, 0},
      {"B2", &op.lower.B2, &r.op.lower.B2, 0, 0}, {"B1", &op.lower.B1, &r.op.lower.B1, 0, 1},
  };
  for (const auto& role : roles) {
    RescaledTerm t;
    t.name = role.name;
    t.prefactor = monomial_prefactor(role.t_role, role.tau_role, role.spec->degree);
    t.coefficient = rescale_coefficient(role.spec->poly, l, tf, role.t_role, role.tau_role,
                                        t.prefactor);
    role.target->poly = t.coefficient * tf.pow(t.prefactor);
    r.terms.push_back(std::move(t));
  }
  RescaledTerm c;
  c.name = "C";
  c.prefactor = Rational(1);
  c.coefficient = rescale_coefficient(op.lower.C, l, tf, 0, 0, c.prefactor);
  r.op.lower.C = c.coefficient * tf.epsilon;
  r.terms.push_back(std::move(c));
  return r;
}

double OrderFunction::operator()(double t, std::span<const double> x,
                                 std::span<const double> xi) const {
  if (!op) throw InvalidInput("order function has no operator");
  std::vector<double> x0(op->layout.n, 0.0);
  const double a = op->a2.evaluate(t, x.empty() ? std::span<const double>(x0) : x, xi);
  const double f = t + std::pow(1.0 + a, -1.0 / 3.0);
  double r2 = 1;
  for (double v : xi) r2 += v * v;
  return std::pow(f, -N) * std::pow(r2, mu / 4);
}

double order_function_eval(const OrderFunction& of, double t, std::span<const double> x,
                           std::span<const double> xi) {
  return of(t, x, xi);
}

std::string to_string(Metric m) { return m == Metric::G ? "g" : "g_eps"; }

double metric_eval(Metric which, std::span<const double> xi, std::span<const double> dx,
                   std::span<const double> dxi, double epsilon) {
  double r2 = 1, nx = 0, nxi = 0;
  for (double v : xi) r2 += v * v;
  for (double v : dx) nx += v * v;
  for (double v : dxi) nxi += v * v;
  const double sx = which == Metric::G ? 1.0 : epsilon * epsilon;
  return sx * nx + nxi / r2;
}

namespace {

// Uniform in the ball of radius rad.
std::vector<double> ball(Rng& rng, std::size_t n, double rad) {
  std::vector<double> v(n);
  while (true) {
    double s = 0;
    for (auto& c : v) {
      c = rng.uniform(-1, 1);
      s += c * c;
    }
    if (s <= 1) break;
  }
  for (auto& c : v) c *= rad;
  return v;
}

// Log-uniform magnitude in [lo, hi], uniform direction.
std::vector<double> random_covector(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v;
  double s = 0;
  while (s < 1e-6) {
    v = ball(rng, n, 1.0);
    s = 0;
    for (double c : v) s += c * c;
  }
  const double r = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.uniform());
  for (auto& c : v) c *= r / std::sqrt(s);
  return v;
}

}  // namespace

SlowVariationReport slow_variation_check(const OrderFunction& of, double t,
                                         std::size_t samples, std::uint64_t seed,
                                         double xi_max) {
  if (!of.op) throw InvalidInput("order function has no operator");
  const std::size_t n = of.op->layout.n;
  Rng rng(seed);
  SlowVariationReport rep;
  rep.samples = samples;
  rep.min_ratio = INFINITY;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto xi = random_covector(rng, n, 1e-3, xi_max);
    const auto x = ball(rng, n, 1.0);
    double r2 = 1;
    for (double v : xi) r2 += v * v;
    auto dx = ball(rng, n, std::sqrt(0.5));
    auto dxi = ball(rng, n, std::sqrt(0.5 * r2));
    std::vector<double> x2(n), xi2(n);
    for (std::size_t j = 0; j < n; ++j) {
      x2[j] = x[j] + dx[j];
      xi2[j] = xi[j] + dxi[j];
    }
    const double q = of(t, x, xi) / of(t, x2, xi2);
    rep.max_ratio = std::max(rep.max_ratio, q);
    rep.min_ratio = std::min(rep.min_ratio, q);
  }
  return rep;
}

DerivativeQuotients derivative_quotients(const ModelOperator& op, int N, double t,
                                         std::size_t samples, std::uint64_t seed,
                                         double xi_max) {
  const std::size_t n = op.layout.n;
  const OrderFunction F{&op, N, 0.0};
  const std::vector<double> x0(n, 0.0);
  Rng rng(seed);
  DerivativeQuotients q;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto xi = random_covector(rng, n, 1e-2, xi_max);
    double r2 = 1;
    for (double v : xi) r2 += v * v;
    const double jp = std::sqrt(r2);
    const double h = 1e-3 * jp;
    const double m = F(t, x0, xi);
    auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
      auto z = xi;
      z[i] += di;
      z[j] += dj;
      return F(t, x0, z);
    };
    double g2 = 0, h2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (at(i, h, i, 0) - at(i, -h, i, 0)) / (2 * h);
      g2 += d * d;
      for (std::size_t j = 0; j < n; ++j) {
        const double d2 = (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) /
                          (4 * h * h);
        h2 += d2 * d2;
      }
    }
    q.order[0] = std::max(q.order[0], m / m);
    q.order[1] = std::max(q.order[1], std::sqrt(g2) * jp / m);
    q.order[2] = std::max(q.order[2], std::sqrt(h2) * r2 / m);
  }
  return q;
}

Coupling resolve_coupling(std::optional<double> epsilon, std::optional<int> N,
                          double coupling_constant) {
  if (!(coupling_constant > 0)) throw InvalidInput("coupling constant must be positive");
  if (epsilon && !(*epsilon > 0 && *epsilon <= 1)) {
    throw InvalidInput("epsilon must lie in (0, 1]");
  }
  if (N && *N < 1) throw InvalidInput("N must be >= 1");
  Coupling c;
  if (epsilon && N) {
    if (*epsilon * *N > coupling_constant * (1 + 1e-12)) {
      throw InvalidInput("epsilon * N = " + std::to_string(*epsilon * *N) +
                         " exceeds the coupling constant " + std::to_string(coupling_constant));
    }
    c.epsilon = *epsilon;
    c.N = *N;
  } else if (N) {
    c.N = *N;
    c.epsilon = std::min(1.0, coupling_constant / *N);
  } else if (epsilon) {
    c.epsilon = *epsilon;
    c.N = static_cast<int>(std::floor(coupling_constant / *epsilon * (1 + 1e-12)));
    if (c.N < 1) throw InvalidInput("epsilon exceeds the coupling constant; no N >= 1 fits");
  } else {
    throw InvalidInput("need epsilon or N");
  }
  return c;
}

}  // namespace trichar
