#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "support.hpp"
#include "trichar/errors.hpp"
#include "trichar/symbol_core.hpp"

using namespace trichar;
using namespace trichar::testing;

namespace {

std::vector<double> lambdas(const CubicAnalysis& a) {
  return {a.lambda[0], a.lambda[1], a.lambda[2]};
}

}  // namespace

TEST_CASE("principal symbol evaluation") {
  const auto op = simple_operator(2);
  const std::vector<double> x{0.3, -0.2}, xi{1.0, 0.0};
  CHECK(principal_symbol(op, 1.0, x, 1.0, xi) == doctest::Approx(0.0));
  CHECK(principal_symbol(op, 4.0, x, 2.0, xi) == doctest::Approx(0.0));
  Rng rng(3);
  const auto gen = random_operator(2, rng);
  CHECK(principal_symbol(gen, 0.0, x, 0.0, std::vector<double>{0.4, 2.0}) == 0.0);
  // Polynomial form agrees with the direct evaluation.
  const std::vector<double> z{0.05, 0.3, -0.2, 0.7, 0.4, 2.0};
  CHECK(gen.principal_symbol().evaluate(z) ==
        doctest::Approx(principal_symbol(gen, 0.05, x, 0.7, std::vector<double>{0.4, 2.0})));
}

TEST_CASE("trigonometric roots on closed-form cases") {
  const auto op = simple_operator(2);
  const std::vector<double> x{0, 0}, e1{1, 0};
  const auto a = solve_cubic_trig(op, 1.0, x, e1);
  CHECK(a.degenerate_flag == RootBranch::trig);
  CHECK(set_distance(lambdas(a), {-1, 0, 1}, 1.0) < 1e-14);

  Rng rng(11);
  const auto gen = random_operator(2, rng);
  const auto z = solve_cubic_trig(gen, 0.0, x, e1);
  CHECK(z.degenerate_flag == RootBranch::cardano_fallback);
  for (double l : z.lambda) CHECK(l == 0.0);
  for (double d : z.delta) CHECK(d == 0.0);
}

TEST_CASE("roots match the companion-matrix oracle") {
  auto op = ModelOperator::zero(2);
  op.a1.poly = xi_linear(op.layout, {1.0, 0.0});
  op.a2.poly = xi_norm_sq(op.layout);
  const std::vector<double> x{0, 0}, e1{1, 0};
  const auto a = solve_cubic_trig(op, 0.01, x, e1);
  const auto ref = companion_roots(a.coefs.A(), a.coefs.B(), a.coefs.C());
  std::vector<double> re;
  for (auto r : ref) {
    CHECK(std::abs(r.imag()) < 1e-12);
    re.push_back(r.real());
  }
  CHECK(set_distance(lambdas(a), re, 1.0) < 1e-10);
}

TEST_CASE("discriminant closed forms") {
  auto op = simple_operator(2);
  const std::vector<double> x{0, 0};
  const double t = 0.7;
  const auto d = discriminant(op, t, x, std::vector<double>{0.6, 0.8});
  CHECK(d.value == doctest::Approx(-t * t * t / 27.0).epsilon(1e-14));
  CHECK(discriminant(op, 3.0, x, std::vector<double>{1, 0}).value ==
        doctest::Approx(-1.0).epsilon(1e-14));
  const auto scaled = discriminant(op, t, x, std::vector<double>{1.2, 1.6});
  CHECK(scaled.xi_norm == doctest::Approx(2.0));
  CHECK(scaled.homogeneity_factor == doctest::Approx(64.0));
  CHECK(scaled.value == doctest::Approx(d.value));
  CHECK_THROWS_AS(discriminant(op, t, x, std::vector<double>{0, 0}), InvalidInput);
}

TEST_CASE("small-t discriminant behaviour via Richardson extrapolation") {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto op = random_operator(2, rng);
    const auto w = random_unit(2, rng);
    const std::vector<double> x{0.1, 0.2};
    const double a2 = op.a2.evaluate(0.0, x, w);
    auto D = [&](double t) { return discriminant(op, t, x, w).value / (t * t * t); };
    const double h = 1e-3;
    const double rich = 2 * D(h / 2) - D(h);
    CHECK(rich == doctest::Approx(-a2 * a2 * a2 / 27.0).epsilon(1e-5));
  }
}

TEST_CASE("delta symbols") {
  const auto op = simple_operator(2);
  const std::vector<double> x{0, 0}, w{0.6, 0.8};
  const double t = 0.3;
  const auto a = solve_cubic_trig(op, t, x, w);
  std::vector<double> d(a.delta.begin(), a.delta.end());
  CHECK(set_distance(d, {2 * t, 2 * t, -t}, 1.0) < 1e-14);
  CHECK(a.delta_identity_residual < 1e-14);
}

TEST_CASE("complex roots raise DiscriminantPositive") {
  auto op = ModelOperator::zero(1);
  op.a2.poly = xi_norm_sq(op.layout, -1.0);
  const std::vector<double> x{0}, xi{1};
  CHECK_THROWS_AS(solve_cubic_trig(op, 0.5, x, xi), DiscriminantPositive);
}

TEST_CASE("Vieta, oracle agreement and homogeneity on random samples") {
  Rng rng(2024);
  double worst_vieta = 0, worst_oracle = 0, worst_hom = 0, worst_delta = 0;
  int used = 0;
  for (int k = 0; k < 40; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 3);
    const auto op = random_operator(n, rng);
    for (int s = 0; s < 25; ++s) {
      const double t = rng.uniform(1e-4, 0.1);
      std::vector<double> x(n);
      for (auto& v : x) v = rng.uniform(-1, 1);
      auto xi = random_unit(n, rng);
      const double mag = std::exp(rng.uniform(-2, 2));
      for (auto& v : xi) v *= mag;
      CubicAnalysis a;
      try {
        a = solve_cubic_trig(op, t, x, xi);
      } catch (const DiscriminantPositive&) {
        continue;
      }
      ++used;
      const auto& c = a.coefs;
      const auto& l = a.lambda;
      const double S = std::max({std::abs(l[0]), std::abs(l[1]), std::abs(l[2])});
      worst_vieta = std::max({worst_vieta, std::abs(l[0] + l[1] + l[2] + c.A()) / S,
                              std::abs(l[0] * l[1] + l[0] * l[2] + l[1] * l[2] - c.B()) / (S * S),
                              std::abs(l[0] * l[1] * l[2] + c.C()) / (S * S * S)});
      std::vector<double> re;
      for (auto r : companion_roots(c.A(), c.B(), c.C())) re.push_back(r.real());
      worst_oracle = std::max(worst_oracle, set_distance(lambdas(a), re, S));
      worst_delta = std::max(worst_delta, a.delta_identity_residual / (S * S));

      auto xi2 = xi;
      for (auto& v : xi2) v *= 2.5;
      const auto b = solve_cubic_trig(op, t, x, xi2);
      std::vector<double> d1(a.delta.begin(), a.delta.end()), d2(b.delta.begin(), b.delta.end());
      for (auto& v : d1) v *= 6.25;
      worst_hom = std::max(worst_hom, set_distance(d1, d2, 6.25 * S * S));
    }
  }
  CHECK(used > 900);
  CHECK(worst_vieta < 1e-12);
  CHECK(worst_oracle < 1e-9);
  CHECK(worst_delta < 1e-12);
  CHECK(worst_hom < 1e-12);
}

TEST_CASE("root separation scan") {
  Lemma2Grid grid;
  grid.t_nodes = 100;
  grid.directions = unit_directions(2, 16);
  const std::vector<double> x{0, 0};

  const auto simple = lemma2_scan(simple_operator(2), x, 0.1, grid);
  CHECK(simple.gamma == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(simple.gamma1 == doctest::Approx(0.1));
  for (const auto& row : simple.table) CHECK(row.max_cos_deviation < 1e-12);

  Rng rng(9);
  const auto op = random_operator(2, rng);
  const auto res = lemma2_scan(op, x, 0.1, grid);
  CHECK(res.gamma > 0);
  CHECK(res.gamma1 > 0);
  for (const auto& row : res.table) {
    CHECK(row.max_cos_deviation <= 5.0 * std::sqrt(row.t));
  }

  CHECK_THROWS_AS(lemma2_scan(ModelOperator::zero(2), x, 0.1, grid), ScanFailed);
}

TEST_CASE("hyperbolicity limit") {
  const std::vector<double> x{0, 0};
  const auto dirs = unit_directions(2, 8);
  CHECK(hyperbolicity_limit(simple_operator(2), x, 1.0, 50, dirs) == doctest::Approx(1.0));
}

TEST_CASE("weight f") {
  CHECK(weight_f(0.25, 0.0) == doctest::Approx(1.25));
  CHECK(weight_f(0.0, 7.0) == 0.5);
  CHECK(weight_f(0.0, 1.0) == doctest::Approx(0.7937005259840998).epsilon(1e-15));
  CHECK(weight_power(0.0, 7.0, -3.0) == doctest::Approx(8.0));
  const auto op = simple_operator(3);
  for (const auto& w : unit_directions(3, 20)) {
    auto xi = w;
    for (auto& v : xi) v *= 37.0;
    CHECK(1.0 / weight_f(op, 0.5, xi) >= 0.5);
  }
}

TEST_CASE("weight inequality constant") {
  AlphaGrid grid;
  for (int i = 0; i <= 200; ++i) grid.t_values.push_back(i / 200.0);
  for (int j = 0; j <= 200; ++j) grid.a_values.push_back(std::expm1(j * 0.08));
  const auto res = weight_inequality_alpha(grid);
  CHECK(res.alpha >= 1.0 / 3.0 - 1e-12);
  CHECK(res.violations_third == 0);
  CHECK(res.f_upper_violations == 0);
  CHECK(res.f_lower_violations == 0);
  CHECK(weight_consequence_violation(grid, 1.0 / 3.0, 6) <= 1e-12);

  // At t = 0 both sides are (1+a)^{-1}: any alpha <= 1 passes.
  AlphaGrid t0{{0.0}, grid.a_values};
  CHECK(weight_inequality_alpha(t0).alpha == doctest::Approx(1.0));
}
