#include "trichar/mode_solver.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "trichar/errors.hpp"
#include "trichar/parallel.hpp"
#include "trichar/quadrature.hpp"

namespace trichar {

struct Forcing::SplineData {
  double s0 = 0, s1 = 0;
  boost::math::interpolators::cardinal_cubic_b_spline<double> re, im;
};

Forcing Forcing::expression(std::vector<ForcingTerm> terms) {
  Forcing f;
  for (const auto& t : terms) {
    if (t.power < 0) throw InvalidInput("forcing term power must be >= 0");
  }
  f.terms_ = std::move(terms);
  return f;
}

Forcing Forcing::sampled(double s0, double h, std::vector<cplx> values) {
  if (values.size() < 5) throw InvalidInput("sampled forcing needs at least 5 samples");
  if (!(h > 0)) throw InvalidInput("sampled forcing needs a positive spacing");
  std::vector<double> re(values.size()), im(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    re[i] = values[i].real();
    im[i] = values[i].imag();
  }
  auto data = std::make_shared<SplineData>(SplineData{
      s0, s0 + h * static_cast<double>(values.size() - 1),
      boost::math::interpolators::cardinal_cubic_b_spline<double>(re.begin(), re.end(), s0, h),
      boost::math::interpolators::cardinal_cubic_b_spline<double>(im.begin(), im.end(), s0, h)});
  Forcing f;
  f.kind_ = Kind::Sampled;
  f.spline_ = std::move(data);
  return f;
}

Forcing Forcing::callable(std::function<cplx(double)> fn) {
  Forcing f;
  f.kind_ = Kind::Callable;
  f.fn_ = std::move(fn);
  return f;
}

cplx Forcing::operator()(double s) const {
  switch (kind_) {
    case Kind::Expression: {
      cplx acc{0, 0};
      for (const auto& t : terms_) {
        cplx v = t.coef * std::pow(s, t.power);
        if (t.omega != cplx{0, 0}) v *= std::exp(t.omega * s);
        acc += v;
      }
      return acc;
    }
    case Kind::Sampled: {
      const double c = std::clamp(s, spline_->s0, spline_->s1);
      return {spline_->re(c), spline_->im(c)};
    }
    case Kind::Callable:
      return fn_(s);
  }
  return {0, 0};
}

Forcing Forcing::combine(cplx a, const Forcing& f, cplx b, const Forcing& g) {
  if (f.kind_ == Kind::Expression && g.kind_ == Kind::Expression) {
    std::vector<ForcingTerm> terms;
    for (auto t : f.terms_) {
      t.coef *= a;
      terms.push_back(t);
    }
    for (auto t : g.terms_) {
      t.coef *= b;
      terms.push_back(t);
    }
    return expression(std::move(terms));
  }
  return callable([a, f, b, g](double s) { return a * f(s) + b * g(s); });
}

std::string to_string(DataSite d) {
  return d == DataSite::LowerEnd ? "LowerEnd" : "UpperEnd";
}

namespace {

std::vector<double> in_t(const Polynomial& p, std::span<const double> z) {
  if (p.is_zero()) return {};
  return p.univariate(PhaseLayout::t(), z);
}

std::vector<double> add(std::vector<double> a, const std::vector<double>& b,
                        double sign = 1.0) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += sign * b[i];
  return a;
}

}  // namespace

ModeCoefficients::ModeCoefficients(const ModelOperator& op,
                                   std::span<const double> x,
                                   std::span<const double> xi) {
  const auto& l = op.layout;
  if (xi.size() != l.n) throw InvalidInput("mode xi has wrong dimension");
  if (!x.empty() && x.size() != l.n) throw InvalidInput("mode x has wrong dimension");
  std::vector<double> z(l.nvars(), 0.0);
  for (std::size_t j = 0; j < l.n; ++j) {
    z[l.xi(j)] = xi[j];
    if (!x.empty()) z[l.x(j)] = x[j];
  }
  a1_ = in_t(op.a1.poly, z);
  a2_ = in_t(op.a2.poly, z);
  a3_ = in_t(op.a3.poly, z);
  b_ = add(in_t(op.b.poly, z), in_t(op.lower.B2.poly, z));
  e1_ = add({}, in_t(op.lower.B1.poly, z), -1.0);
  if (!op.lower.C.is_zero()) {
    b_ = add(b_, in_t(op.lower.C.fix_variable(l.tau(), 0.0), z));
    e1_ = add(e1_, in_t(op.lower.C.derivative(l.tau()).fix_variable(l.tau(), 0.0), z), -1.0);
  }
}

ModeCoefficients assemble_rhs(const ModelOperator& op, std::span<const double> xi,
                              std::span<const double> x) {
  return ModeCoefficients(op, x, xi);
}

std::array<cplx, 3> ModeTrajectory::state_at(double s) const {
  if (dense.empty()) throw InvalidInput("trajectory was sampled without dense output");
  const auto y = dense.value(s);
  return {cplx{y[0], y[1]}, cplx{y[2], y[3]}, cplx{y[4], y[5]}};
}

double ModeTrajectory::max_residual() const {
  double m = 0;
  for (double r : residual) m = std::max(m, r);
  return m;
}

double residual_threshold(double rtol) { return std::max(1e-7, 100 * rtol); }

bool ModeTrajectory::residual_ok() const {
  return max_residual() <= residual_threshold(rtol);
}

ModeTrajectory integrate_mode(const ModeProblem& prob, const IntegrateOptions& opt) {
  if (!prob.op) throw InvalidInput("mode problem has no operator");
  if (!(prob.t0 >= 0 && prob.t0 < prob.T && prob.T <= 1)) {
    throw InvalidInput("mode interval must satisfy 0 <= t < T <= 1");
  }
  if (opt.fixed_steps == 0 && !(opt.rtol >= 1e-13 && opt.rtol <= 1e-6)) {
    throw InvalidInput("tolerance must lie in [1e-13, 1e-6]");
  }
  if (opt.samples < 3) throw InvalidInput("need at least 3 output samples");

  const ModeCoefficients co(*prob.op, prob.x, prob.xi);
  const Forcing& g = prob.forcing;
  auto third = [&](double s, const State<6>& y) {
    const cplx u{y[0], y[1]}, v{y[2], y[3]}, w{y[4], y[5]};
    return g(s) - co.c2(s) * w - co.c1(s) * v - co.c0(s) * u;
  };
  auto rhs = [&](double s, const State<6>& y, State<6>& dy) {
    const cplx d3 = third(s, y);
    dy = {y[2], y[3], y[4], y[5], d3.real(), d3.imag()};
  };

  ModeTrajectory tr;
  tr.xi = prob.xi;
  tr.t0 = prob.t0;
  tr.T = prob.T;
  tr.data_site = prob.data_site;
  tr.rtol = opt.rtol;
  tr.atol = opt.atol;

  State<6> y0{prob.data[0].real(), prob.data[0].imag(), prob.data[1].real(),
              prob.data[1].imag(), prob.data[2].real(), prob.data[2].imag()};
  DopriOptions dop;
  dop.rtol = opt.rtol;
  dop.atol = opt.atol;
  dop.max_steps = opt.max_steps;
  dop.fixed_steps = opt.fixed_steps;
  const bool fwd = prob.data_site == DataSite::LowerEnd;
  dopri_integrate<6>(rhs, fwd ? prob.t0 : prob.T, fwd ? prob.T : prob.t0, y0, dop,
                     &tr.dense, &tr.stats);

  tr.times = uniform_grid(prob.t0, prob.T, opt.samples);
  const std::size_t m = tr.times.size();
  tr.u.resize(m);
  tr.du.resize(m);
  tr.d2u.resize(m);
  tr.d3u.resize(m);
  tr.g.resize(m);
  tr.residual.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = tr.times[i];
    const auto y = tr.dense.value(s);
    const auto dy = tr.dense.derivative(s);
    tr.u[i] = {y[0], y[1]};
    tr.du[i] = {y[2], y[3]};
    tr.d2u[i] = {y[4], y[5]};
    tr.g[i] = g(s);
    tr.d3u[i] = third(s, y);
    const double scale = std::abs(tr.g[i]) + std::abs(co.c2(s) * tr.d2u[i]) +
                         std::abs(co.c1(s) * tr.du[i]) + std::abs(co.c0(s) * tr.u[i]) +
                         std::abs(tr.d3u[i]);
    const double gap = std::abs(cplx{dy[4], dy[5]} - tr.d3u[i]);
    tr.residual[i] = scale > 0 ? gap / scale : gap;
  }
  if (!opt.keep_dense) {
    tr.dense.segments.clear();
    tr.dense.segments.shrink_to_fit();
  }
  return tr;
}

std::vector<SweepEntry> sweep(const std::vector<ModeProblem>& modes,
                              const IntegrateOptions& opt, std::size_t workers) {
  return parallel_map(modes.size(), workers, [&](std::size_t i) {
    SweepEntry e;
    try {
      e.trajectory = integrate_mode(modes[i], opt);
    } catch (const StepFailure& ex) {
      e.error_kind = "StepFailure";
      e.error = ex.what();
      e.error_location = ex.location();
    } catch (const ToleranceUnachievable& ex) {
      e.error_kind = "ToleranceUnachievable";
      e.error = ex.what();
      e.error_location = ex.location();
    } catch (const Error& ex) {
      e.error_kind = "InvalidInput";
      e.error = ex.what();
    }
    return e;
  });
}

}  // namespace trichar
