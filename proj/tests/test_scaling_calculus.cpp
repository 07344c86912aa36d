#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "support.hpp"
#include "trichar/errors.hpp"
#include "trichar/scaling_calculus.hpp"

using namespace trichar;
using namespace trichar::testing;

namespace {

// Full symbol tau^3 + t a1 tau^2 - t a2 tau + t^2 a3 + b + B2 + B1 tau + C.
double full_symbol(const ModelOperator& op, double t, const std::vector<double>& x, double tau,
                   const std::vector<double>& xi) {
  const auto& l = op.layout;
  std::vector<double> z(l.nvars(), 0.0);
  z[l.t()] = t;
  z[l.tau()] = tau;
  for (std::size_t j = 0; j < l.n; ++j) {
    z[l.x(j)] = x[j];
    z[l.xi(j)] = xi[j];
  }
  auto ev = [&](const Polynomial& p) { return p.evaluate(z); };
  return tau * tau * tau + t * ev(op.a1.poly) * tau * tau - t * ev(op.a2.poly) * tau +
         t * t * ev(op.a3.poly) + ev(op.b.poly) + ev(op.lower.B2.poly) +
         ev(op.lower.B1.poly) * tau + ev(op.lower.C);
}

ModelOperator with_lower(Rng& rng) {
  auto op = random_operator(2, rng);
  const auto& l = op.layout;
  op.b.poly = xi_norm_sq(l, 2.0) * (Polynomial::constant(l.nvars(), 1.0) + var(l, l.t()));
  op.lower.B2.poly = xi_norm_sq(l, 0.5) * var(l, l.x(1));
  op.lower.B1.poly = xi_linear(l, {1.0, -2.0}) * (Polynomial::constant(l.nvars(), 1.0) +
                                                  var(l, l.x(0)) * var(l, l.t()));
  op.lower.C = var(l, l.tau()) * 0.7 + xi_linear(l, {0.3, 0.1}) + Polynomial::constant(l.nvars(), 2.0) +
               var(l, l.tau()) * var(l, l.x(0));
  return op;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

TEST_CASE("rational arithmetic") {
  CHECK(Rational(2, 6) == Rational(1, 3));
  CHECK(Rational(1, -3) == Rational(-1, 3));
  CHECK(Rational(1, 3) + Rational(2, 3) == Rational(1));
  CHECK((Rational(1, 3) * Rational(3, 2)).to_string() == "1/2");
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(monomial_prefactor(1, 2, 1) == Rational(1, 3));
  CHECK(monomial_prefactor(1, 1, 2) == Rational(0));
  CHECK(monomial_prefactor(2, 0, 3) == Rational(1, 3));
  CHECK(monomial_prefactor(0, 1, 0) == Rational(4, 3));
}

TEST_CASE("identity at eps = 1") {
  Rng rng(1);
  for (int k = 0; k < 10; ++k) {
    const auto op = with_lower(rng);
    CHECK(rescale_operator(op, 1.0).op == op);
  }
  CHECK_THROWS_AS(rescale_operator(simple_operator(2), 0.0), InvalidInput);
  CHECK_THROWS_AS(rescale_operator(simple_operator(2), 1.5), InvalidInput);
}

TEST_CASE("prefactor placement") {
  Rng rng(2);
  const auto r = rescale_operator(with_lower(rng), 0.3);
  CHECK(r.term("a1").prefactor == Rational(1, 3));
  CHECK(r.term("a3").prefactor == Rational(1, 3));
  CHECK(r.term("B1").prefactor == Rational(1, 3));
  CHECK(r.term("a2").prefactor == Rational(0));
  CHECK(r.term("b").prefactor == Rational(0));
  CHECK(r.term("B2").prefactor == Rational(0));
  CHECK(r.term("C").prefactor == Rational(1));
  const auto g = r.groups();
  REQUIRE(g.size() == 3);
  CHECK(g[0].first == Rational(0));
  CHECK(g[0].second == std::vector<std::string>{"a2", "b", "B2"});
  CHECK(g[1].first == Rational(1, 3));
  CHECK(g[1].second == std::vector<std::string>{"a1", "a3", "B1"});
  CHECK(g[2].first == Rational(1));

  // The bracketed coefficients are the original ones at (eps^{2/3} s, eps y).
  const double eps = 0.3;
  const auto op = with_lower(rng);
  const auto rr = rescale_operator(op, eps);
  const std::vector<double> y{0.4, -0.2}, eta{1.5, 2.5};
  const double s = 0.7;
  const std::vector<double> x{eps * y[0], eps * y[1]};
  const double t = std::cbrt(eps * eps) * s;
  const auto& l = op.layout;
  std::vector<double> z(l.nvars(), 0.0);
  z[l.t()] = s;
  for (std::size_t j = 0; j < 2; ++j) {
    z[l.x(j)] = y[j];
    z[l.xi(j)] = eta[j];
  }
  CHECK(rr.term("a1").coefficient.evaluate(z) == doctest::Approx(op.a1.evaluate(t, x, eta)));
  CHECK(rr.term("a2").coefficient.evaluate(z) == doctest::Approx(op.a2.evaluate(t, x, eta)));
  CHECK(rr.term("a3").coefficient.evaluate(z) == doctest::Approx(op.a3.evaluate(t, x, eta)));
}

TEST_CASE("full symbol chain rule") {
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const auto op = with_lower(rng);
    const double eps = rng.uniform(0.01, 1.0);
    const auto r = rescale_operator(op, eps);
    for (int m = 0; m < 10; ++m) {
      const double s = rng.uniform(0, 1), sigma = rng.uniform(-3, 3);
      const std::vector<double> y{rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const std::vector<double> eta{rng.uniform(-5, 5), rng.uniform(-5, 5)};
      const double e23 = std::cbrt(eps * eps);
      const double lhs = full_symbol(r.op, s, y, sigma, eta);
      const double rhs = eps * eps * full_symbol(op, e23 * s, {eps * y[0], eps * y[1]},
                                                 sigma / e23, {eta[0] / eps, eta[1] / eps});
      CHECK(rel(lhs, rhs) < 1e-11);
    }
  }
}

TEST_CASE("group property") {
  Rng rng(4);
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const auto op = with_lower(rng);
    const double e1 = rng.uniform(0.05, 1), e2 = rng.uniform(0.05, 1);
    const auto twice = rescale_operator(rescale_operator(op, e1).op, e2).op;
    const auto once = rescale_operator(op, e1 * e2).op;
    for (int m = 0; m < 20; ++m) {
      const double s = rng.uniform(0, 1), sigma = rng.uniform(-3, 3);
      const std::vector<double> y{rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const std::vector<double> eta{rng.uniform(-5, 5), rng.uniform(-5, 5)};
      worst = std::max(worst, rel(full_symbol(twice, s, y, sigma, eta),
                                  full_symbol(once, s, y, sigma, eta)));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("rescaled roots") {
  Rng rng(5);
  int used = 0;
  for (int k = 0; k < 60; ++k) {
    auto op = random_operator(2, rng);
    const double eps = rng.uniform(0.05, 1);
    const auto r = rescale_operator(op, eps);
    const double s = rng.uniform(0.05, 1);
    const std::vector<double> y{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const std::vector<double> eta{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const double e23 = std::cbrt(eps * eps);
    const std::vector<double> x{eps * y[0], eps * y[1]}, xi{eta[0] / eps, eta[1] / eps};
    CubicAnalysis b;
    try {
      b = solve_cubic_trig(op, e23 * s, x, xi);
    } catch (const DiscriminantPositive&) {
      CHECK_THROWS_AS(solve_cubic_trig(r.op, s, y, eta), DiscriminantPositive);
      continue;
    }
    ++used;
    const auto a = solve_cubic_trig(r.op, s, y, eta);
    std::vector<double> ra(a.lambda.begin(), a.lambda.end()), rb;
    for (double v : b.lambda) rb.push_back(e23 * v);
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    double scale = 0;
    for (double v : rb) scale = std::max(scale, std::abs(v));
    for (int j = 0; j < 3; ++j) CHECK(std::abs(ra[j] - rb[j]) <= 1e-10 * std::max(1.0, scale));
  }
  CHECK(used >= 10);
}

TEST_CASE("order function and metrics") {
  const auto op = simple_operator(2);
  const std::vector<double> x{0.2, -0.1};
  Rng rng(6);
  for (int k = 0; k < 50; ++k) {
    const double t = rng.uniform(0, 1);
    const std::vector<double> xi{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const int N = 1 + k % 7;
    const double m0 = order_function_eval({&op, N, 0.0}, t, x, xi);
    CHECK(m0 == doctest::Approx(std::pow(weight_f(op, t, xi), -N)).epsilon(1e-12));
    const double mu = rng.uniform(-3, 3);
    const double m = order_function_eval({&op, N, mu}, t, x, xi);
    CHECK(m > 0);
    CHECK(m == doctest::Approx(m0 * std::pow(1 + xi[0] * xi[0] + xi[1] * xi[1], mu / 4)));

    const std::vector<double> dx{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const std::vector<double> dxi{rng.uniform(-9, 9), rng.uniform(-9, 9)};
    CHECK(metric_eval(Metric::GEpsilon, xi, dx, dxi, 1.0) == metric_eval(Metric::G, xi, dx, dxi));
    const double eps = rng.uniform(0.01, 1);
    CHECK(metric_eval(Metric::GEpsilon, xi, dx, dxi, eps) <= metric_eval(Metric::G, xi, dx, dxi));
    CHECK(metric_eval(Metric::GEpsilon, xi, {}, dxi, eps) ==
          doctest::Approx(metric_eval(Metric::G, xi, {}, dxi)));
  }
}

TEST_CASE("symbol class heuristics") {
  Rng rng(7);
  const auto op = random_operator(2, rng);
  for (int N : {1, 4, 8}) {
    const OrderFunction of{&op, N, 0.0};
    const auto lo = slow_variation_check(of, 0.1, 2000, 11, 1e2);
    const auto hi = slow_variation_check(of, 0.1, 2000, 11, 1e6);
    CHECK(lo.min_ratio > 0);
    CHECK(hi.max_ratio < 2 * std::max(lo.max_ratio, 1.0) + 1);
    CHECK(hi.max_ratio < std::pow(4.0, N));
    CHECK(1 / hi.min_ratio < std::pow(4.0, N));

    const auto qa = derivative_quotients(op, N, 0.1, 300, 3, 1e2);
    const auto qb = derivative_quotients(op, N, 0.1, 300, 3, 1e6);
    CHECK(qa.order[0] == doctest::Approx(1.0));
    for (int k = 1; k <= 2; ++k) {
      CHECK(std::isfinite(qb.order[k]));
      CHECK(qb.order[k] < 2 * std::pow(N + 1.0, k) * 4);
    }
  }
}

TEST_CASE("eps N coupling") {
  auto c = resolve_coupling(std::nullopt, 8);
  CHECK(c.epsilon == doctest::Approx(0.125));
  c = resolve_coupling(0.1, std::nullopt);
  CHECK(c.N == 10);
  c = resolve_coupling(0.3, std::nullopt, 2.0);
  CHECK(c.N == 6);
  CHECK(resolve_coupling(0.1, 10).N == 10);
  CHECK_THROWS_AS(resolve_coupling(0.2, 10), InvalidInput);
  CHECK_THROWS_AS(resolve_coupling(std::nullopt, std::nullopt), InvalidInput);
  CHECK_THROWS_AS(resolve_coupling(1.0, std::nullopt, 0.5), InvalidInput);
  CHECK_THROWS_AS(resolve_coupling(0.0, std::nullopt), InvalidInput);
  CHECK(resolve_coupling(std::nullopt, 1, 4.0).epsilon == 1.0);
}
