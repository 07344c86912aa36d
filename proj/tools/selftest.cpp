#include <algorithm>
#include <cmath>
#include <memory>

#include <Eigen/Dense>

#include "cli.hpp"
#include "trichar/energy_verifier.hpp"
#include "trichar/errors.hpp"
#include "trichar/geometry.hpp"
#include "trichar/grids.hpp"
#include "trichar/mode_solver.hpp"
#include "trichar/scaling_calculus.hpp"
#include "trichar/symbol_core.hpp"
#include "trichar/wellposedness_probe.hpp"

namespace trichar::cli {

namespace {

using json = nlohmann::json;

Polynomial xi_monomial(const PhaseLayout& l, std::vector<int> alpha, double c) {
  Polynomial::Exponents e(l.nvars(), 0);
  for (std::size_t j = 0; j < l.n; ++j) e[l.xi(j)] = alpha[j];
  return Polynomial::monomial(e, c);
}

ModelOperator sample_operator(Rng& rng, double beta = 0) {
  auto op = ModelOperator::zero(2);
  const auto& l = op.layout;
  op.a2.poly = xi_monomial(l, {2, 0}, 1) + xi_monomial(l, {0, 2}, 1);
  op.a1.poly = xi_monomial(l, {1, 0}, rng.uniform(-1, 1)) + xi_monomial(l, {0, 1}, rng.uniform(-1, 1));
  for (int k = 0; k <= 3; ++k) op.a3.poly += xi_monomial(l, {k, 3 - k}, rng.uniform(-0.3, 0.3));
  if (beta != 0) op.b.poly = op.a2.poly * beta;
  return op;
}

std::vector<double> companion_real_roots(double A, double B, double C) {
  Eigen::Matrix3d M;
  M << -A, -B, -C, 1, 0, 0, 0, 1, 0;
  const Eigen::Vector3cd ev = M.eigenvalues();
  std::vector<double> r{ev(0).real(), ev(1).real(), ev(2).real()};
  std::sort(r.begin(), r.end());
  return r;
}

json check(const std::string& name, double value, double tol, bool pass) {
  return {{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", pass}};
}

json roots_check() {
  Rng rng(11);
  double worst = 0;
  int used = 0;
  for (int k = 0; k < 40; ++k) {
    const auto op = sample_operator(rng);
    for (int m = 0; m < 50; ++m) {
      const double t = rng.uniform(1e-4, 1);
      const std::vector<double> x{0, 0};
      const std::vector<double> xi{rng.uniform(-5, 5), rng.uniform(-5, 5)};
      CubicAnalysis a;
      try {
        a = solve_cubic_trig(op, t, x, xi);
      } catch (const DiscriminantPositive&) {
        continue;
      }
      ++used;
      std::vector<double> l(a.lambda.begin(), a.lambda.end());
      std::sort(l.begin(), l.end());
      const auto o = companion_real_roots(a.coefs.A(), a.coefs.B(), a.coefs.C());
      const double S = std::max({1e-300, std::abs(l[0]), std::abs(l[2])});
      for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(l[j] - o[j]) / S);
    }
  }
  return check("roots match companion eigenvalues", worst, 1e-9, used > 100 && worst < 1e-9);
}

json weight_check() {
  AlphaGrid g;
  for (int i = 0; i <= 100; ++i) g.t_values.push_back(i / 100.0);
  for (int j = 0; j <= 100; ++j) g.a_values.push_back(std::expm1(j * 0.15));
  const auto r = weight_inequality_alpha(g);
  const auto bad = r.violations_third + r.f_upper_violations + r.f_lower_violations;
  return check("weight inequality with alpha = 1/3", static_cast<double>(bad), 0, bad == 0);
}

json spectrum_check() {
  // p = tau^2 - t^2 xi^2 at (0, 0, 0, 1): spectrum {2, -2, 0, 0}.
  const PhaseLayout l{1};
  Polynomial p = Polynomial::monomial({0, 0, 2, 0}, 1.0) + Polynomial::monomial({2, 0, 0, 2}, -1.0);
  PhasePoint z{{0, 0}, {0, 1}};
  const auto rep = classify_spectrum(fundamental_matrix(p, l, z));
  std::vector<double> re;
  for (auto mu : rep.eigenvalues) re.push_back(mu.real());
  std::sort(re.begin(), re.end());
  const double err = std::max({std::abs(re[0] + 2), std::abs(re[1]), std::abs(re[2]), std::abs(re[3] - 2)});
  return check("fundamental matrix of tau^2 - t^2 xi^2", err, 1e-10,
               err < 1e-10 && rep.verdict == Verdict::EffectivelyHyperbolic);
}

json mode_check() {
  auto op = std::make_shared<ModelOperator>(ModelOperator::zero(2));
  const auto& l = op->layout;
  op->a2.poly = xi_monomial(l, {2, 0}, 1) + xi_monomial(l, {0, 2}, 1);
  ModeProblem p;
  p.op = op;
  p.xi = {0.6, 0.8};
  p.forcing = Forcing::expression({{6.0, 0, 0.0}, {3.0, 3, 0.0}});
  const auto tr = integrate_mode(p);
  double err = 0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const double s = tr.times[i];
    err = std::max(err, std::abs(tr.u[i] - s * s * s));
  }
  return check("manufactured mode u = s^3", err, 1e-8, err < 1e-8 && tr.residual_ok());
}

json identity_check(std::size_t workers) {
  Rng rng(5);
  auto op = std::make_shared<const ModelOperator>(sample_operator(rng, 1.0));
  std::vector<ModeProblem> modes;
  for (int k = 0; k < 8; ++k) {
    ModeProblem p;
    p.op = op;
    p.xi = {rng.uniform(-4, 4), rng.uniform(-4, 4)};
    p.forcing = Forcing::expression({{cplx{1, 2}, 1, cplx{0, 3}}, {0.5, 0, 0.0}});
    modes.push_back(p);
  }
  double worst = 0;
  for (const auto& e : sweep(modes, {}, workers)) {
    if (!e.ok()) return check("master identity", INFINITY, 1e-7, false);
    worst = std::max(worst, verify_master_identity(*e.trajectory, *op, 3.0, 4).relative);
  }
  return check("master identity", worst, 1e-7, worst < 1e-7);
}

json loss_check() {
  const int n5 = oleinik_loss_count(SecondOrderExample::power_law(1.0, 2));
  const int n7 = oleinik_loss_count(SecondOrderExample::power_law(1.0, 2, 1.0));
  return check("loss counts 5 and 7", n5 * 10 + n7, 0, n5 == 5 && n7 == 7);
}

json scaling_check() {
  Rng rng(3);
  const auto op = sample_operator(rng, 2.0);
  const bool identity = rescale_operator(op, 1.0).op == op;
  const auto twice = rescale_operator(rescale_operator(op, 0.3).op, 0.5).op;
  const auto once = rescale_operator(op, 0.15).op;
  double worst = 0;
  for (int k = 0; k < 50; ++k) {
    const double s = rng.uniform(0, 1), tau = rng.uniform(-3, 3);
    const std::vector<double> y{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const std::vector<double> eta{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const double a = principal_symbol(twice, s, y, tau, eta), b = principal_symbol(once, s, y, tau, eta);
    worst = std::max(worst, std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}));
  }
  return check("scaling identity and group property", worst, 1e-12, identity && worst < 1e-12);
}

json growth_check() {
  std::vector<double> xi, m;
  for (int k = 0; k <= 10; ++k) {
    xi.push_back(std::exp2(k));
    m.push_back(std::pow(xi.back(), 3));
  }
  const auto r = growth_fit(xi, m);
  const double err = std::abs(r.k - 3);
  return check("growth fit of |xi|^3", err, 1e-9, err < 1e-9 && r.verdict == GrowthVerdict::PolynomialLoss);
}

}  // namespace

json run_selftest(std::size_t workers, bool& pass) {
  json checks = json::array();
  auto guarded = [&](const char* name, auto&& fn) {
    try {
      checks.push_back(fn());
    } catch (const std::exception& e) {
      checks.push_back({{"name", name}, {"pass", false}, {"error", e.what()}});
    }
  };
  guarded("roots", roots_check);
  guarded("weight", weight_check);
  guarded("spectrum", spectrum_check);
  guarded("mode", mode_check);
  guarded("identity", [&] { return identity_check(workers); });
  guarded("loss", loss_check);
  guarded("scaling", scaling_check);
  guarded("growth", growth_check);
  pass = true;
  for (const auto& c : checks) pass = pass && c["pass"].get<bool>();
  return {{"checks", checks}, {"subcommand", "selftest"}};
}

}  // namespace trichar::cli
