#include "doctest.h"

#include <cmath>
#include <memory>
#include <vector>

#include "support.hpp"
#include "trichar/errors.hpp"
#include "trichar/mode_solver.hpp"

using namespace trichar;
using namespace trichar::testing;

namespace {

const cplx I{0, 1};

// u = e^{is} for an arbitrary operator: g = u''' + c2 u'' + c1 u' + c0 u.
ModeProblem exp_mode(std::shared_ptr<const ModelOperator> op, std::vector<double> xi) {
  ModeProblem p;
  p.op = op;
  p.xi = xi;
  const auto co = std::make_shared<ModeCoefficients>(*op, std::vector<double>{}, xi);
  p.forcing = Forcing::callable([co](double s) {
    const cplx e = std::exp(I * s);
    return e * (-I - co->c2(s) + co->c1(s) * I + co->c0(s));
  });
  p.t0 = 0;
  p.T = 1;
  p.data = {1.0, I, -1.0};
  return p;
}

double max_error_exp(const ModeTrajectory& tr) {
  double e = 0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const cplx ex = std::exp(I * tr.times[i]);
    e = std::max({e, std::abs(tr.u[i] - ex), std::abs(tr.du[i] - I * ex),
                  std::abs(tr.d2u[i] + ex)});
  }
  return e;
}

}  // namespace

TEST_CASE("assembled coefficients") {
  auto op = std::make_shared<ModelOperator>(simple_operator(2, 3.0));
  const std::vector<double> xi{1.0, 2.0};
  const auto co = assemble_rhs(*op, xi);
  CHECK(co.c2(0.5) == cplx{0, 0});
  CHECK(co.c1(0.5) == doctest::Approx(2.5));
  CHECK(co.c0(0.5).imag() == doctest::Approx(-15.0));
  CHECK(co.c0(0.5).real() == 0.0);
  CHECK(co.c1(0.0) == 0.0);
  CHECK(co.c0(0.0) == co.b1(0.0));

  Rng rng(1);
  const auto gen = random_operator(2, rng);
  const auto cg = assemble_rhs(gen, xi);
  CHECK(cg.c2(0.0) == cplx{0, 0});
  CHECK(cg.c1(0.0) == 0.0);
  const double s = 0.3;
  const std::vector<double> x0{0, 0};
  CHECK(cg.c2(s).imag() == doctest::Approx(s * gen.a1.evaluate(s, x0, xi)));
  CHECK(cg.c0(s).imag() == doctest::Approx(-s * s * gen.a3.evaluate(s, x0, xi)));
}

TEST_CASE("manufactured cubic mode") {
  auto op = std::make_shared<ModelOperator>(simple_operator(2));
  ModeProblem p;
  p.op = op;
  p.xi = {0.6, 0.8};
  const double a2 = 1.0;
  p.forcing = Forcing::expression({{6.0, 0, 0.0}, {3.0 * a2, 3, 0.0}});
  const double tol = 1e-10;
  IntegrateOptions opt;
  opt.rtol = tol;
  const auto tr = integrate_mode(p, opt);
  double err = 0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const double s = tr.times[i];
    err = std::max(err, std::abs(tr.u[i] - s * s * s));
  }
  CHECK(err < 10 * tol);
  CHECK(tr.residual_ok());
}

TEST_CASE("zero data and zero forcing stay zero") {
  ModeProblem p;
  p.op = std::make_shared<ModelOperator>(simple_operator(2, 1.0));
  p.xi = {3, 4};
  const auto tr = integrate_mode(p);
  for (const auto& v : tr.u) CHECK(v == cplx{0, 0});
  CHECK(tr.max_residual() == 0.0);
}

TEST_CASE("exponential manufactured mode") {
  auto op = std::make_shared<ModelOperator>(simple_operator(2, 1.0));
  ModeProblem p;
  p.op = op;
  p.xi = {1, 0};
  const cplx c0 = -I;  // b = |xi|^2
  p.forcing = Forcing::expression({{-I, 0, I}, {I, 1, I}, {c0, 0, I}});
  p.data = {1.0, I, -1.0};
  const auto tr = integrate_mode(p);
  CHECK(max_error_exp(tr) < 1e-8);
  CHECK(tr.residual_ok());
}

TEST_CASE("observed order of the fixed-step scheme") {
  Rng rng(3);
  auto op = std::make_shared<ModelOperator>(random_operator(2, rng));
  const auto p = exp_mode(op, {2.0, -1.0});
  std::vector<double> errs;
  for (std::size_t steps : {10u, 20u, 40u, 80u}) {
    IntegrateOptions opt;
    opt.fixed_steps = steps;
    opt.samples = 3;
    errs.push_back(max_error_exp(integrate_mode(p, opt)));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    CHECK(std::log2(errs[i - 1] / errs[i]) >= 4.5);
  }
}

TEST_CASE("adaptive accuracy on a generic operator") {
  Rng rng(5);
  auto op = std::make_shared<ModelOperator>(random_operator(2, rng));
  const auto tr = integrate_mode(exp_mode(op, {4.0, 3.0}));
  CHECK(max_error_exp(tr) < 1e-8);
  CHECK(tr.residual_ok());
}

TEST_CASE("time reversal") {
  auto op = std::make_shared<ModelOperator>(simple_operator(2, 2.0));
  ModeProblem p;
  p.op = op;
  p.xi = {5.0, 1.0};
  p.t0 = 0.1;
  p.T = 0.9;
  p.forcing = Forcing::expression({{1.0, 1, cplx{0, 3}}, {cplx{0.5, -1}, 0, 0.0}});
  p.data = {cplx{0.2, 0.1}, cplx{-1, 0}, cplx{0, 2}};
  const auto fwd = integrate_mode(p);
  ModeProblem q = p;
  q.data_site = DataSite::UpperEnd;
  q.data = {fwd.u.back(), fwd.du.back(), fwd.d2u.back()};
  const auto back = integrate_mode(q);
  double err = 0;
  for (int k = 0; k < 3; ++k) {
    const cplx a = k == 0 ? back.u.front() : k == 1 ? back.du.front() : back.d2u.front();
    err = std::max(err, std::abs(a - p.data[static_cast<std::size_t>(k)]));
  }
  CHECK(err < 1e-8);
  CHECK(back.residual_ok());
}

TEST_CASE("linearity in forcing and data") {
  Rng rng(6);
  auto op = std::make_shared<ModelOperator>(random_operator(2, rng));
  ModeProblem p1, p2;
  p1.op = p2.op = op;
  p1.xi = p2.xi = {1.5, -2.5};
  p1.forcing = Forcing::expression({{1.0, 2, cplx{0, 2}}});
  p2.forcing = Forcing::expression({{cplx{0, 1}, 0, cplx{-1, 0}}});
  p1.data = {1.0, 0.0, 0.0};
  p2.data = {0.0, cplx{0, 1}, 0.5};
  const cplx alpha{0.7, -0.3};
  ModeProblem pc = p1;
  pc.forcing = Forcing::combine(alpha, p1.forcing, 1.0, p2.forcing);
  for (std::size_t k = 0; k < 3; ++k) pc.data[k] = alpha * p1.data[k] + p2.data[k];
  const auto a = integrate_mode(p1), b = integrate_mode(p2), c = integrate_mode(pc);
  double err = 0;
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    err = std::max(err, std::abs(c.u[i] - (alpha * a.u[i] + b.u[i])));
  }
  CHECK(err < 1e-9);
}

TEST_CASE("sampled forcing matches the closed form") {
  auto op = std::make_shared<ModelOperator>(simple_operator(2));
  ModeProblem p;
  p.op = op;
  p.xi = {1.0, 1.0};
  p.forcing = Forcing::expression({{1.0, 1, cplx{0, 2}}});
  std::vector<cplx> vals;
  const std::size_t m = 401;
  for (std::size_t i = 0; i < m; ++i) vals.push_back(p.forcing(i / double(m - 1)));
  ModeProblem q = p;
  q.forcing = Forcing::sampled(0.0, 1.0 / (m - 1), vals);
  CHECK(std::abs(q.forcing(0.37) - p.forcing(0.37)) < 1e-7);
  const auto a = integrate_mode(p), b = integrate_mode(q);
  CHECK(std::abs(a.u.back() - b.u.back()) < 1e-7);
}

TEST_CASE("sweep ordering and determinism") {
  auto op = std::make_shared<ModelOperator>(simple_operator(2, 1.0));
  std::vector<ModeProblem> modes;
  for (int k = 0; k < 64; ++k) {
    ModeProblem p;
    p.op = op;
    const double r = std::exp2(k * 10.0 / 63.0);
    const double a = 0.7 * k;
    p.xi = {r * std::cos(a), r * std::sin(a)};
    p.forcing = Forcing::expression({{1.0, 0, cplx{0, 1}}});
    modes.push_back(p);
  }
  const auto res = sweep(modes, {}, 1);
  for (const auto& e : res) {
    REQUIRE(e.ok());
    CHECK(e.trajectory->residual_ok());
  }
  std::vector<ModeProblem> perm(modes.rbegin(), modes.rend());
  const auto rp = sweep(perm, {}, 3);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& a = res[i].trajectory->u;
    const auto& b = rp[modes.size() - 1 - i].trajectory->u;
    CHECK(a == b);
  }
  const auto single = sweep({modes[5]}, {}, 1);
  CHECK(single[0].trajectory->u == integrate_mode(modes[5]).u);
}

TEST_CASE("errors") {
  auto op = std::make_shared<ModelOperator>(simple_operator(2));
  ModeProblem p;
  p.op = op;
  p.xi = {1, 0};
  IntegrateOptions bad;
  bad.rtol = 1e-3;
  CHECK_THROWS_AS(integrate_mode(p, bad), InvalidInput);
  ModeProblem wide = p;
  wide.T = 1.5;
  CHECK_THROWS_AS(integrate_mode(wide), InvalidInput);

  ModeProblem blow = p;
  blow.forcing = Forcing::callable([](double s) { return cplx{1.0 / ((0.5 - s) * (0.5 - s)), 0}; });
  CHECK_THROWS_AS(integrate_mode(blow), StepFailure);

  IntegrateOptions few;
  few.max_steps = 5;
  ModeProblem fast = p;
  fast.xi = {300, 0};
  fast.data = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(integrate_mode(fast, few), ToleranceUnachievable);

  const auto res = sweep({blow, p}, {}, 2);
  CHECK_FALSE(res[0].ok());
  CHECK(res[0].error_kind == "StepFailure");
  CHECK(res[0].error_location == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(res[1].ok());
}
