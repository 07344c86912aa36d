#include "trichar/wellposedness_probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "trichar/errors.hpp"
#include "trichar/grids.hpp"
#include "trichar/mode_solver.hpp"
#include "trichar/parallel.hpp"
#include "trichar/quadrature.hpp"

namespace trichar {

cplx ComplexCoef::operator()(double t, double x) const {
  const std::array<double, 2> z{t, x};
  return {re.evaluate(z), im.evaluate(z)};
}

SecondOrderExample SecondOrderExample::power_law(double coef, int power, cplx b1) {
  SecondOrderExample ex;
  ex.a = Polynomial::monomial({power, 0}, coef);
  if (b1.real() != 0) ex.b1.re = Polynomial::constant(2, b1.real());
  if (b1.imag() != 0) ex.b1.im = Polynomial::constant(2, b1.imag());
  return ex;
}

double SecondOrderExample::a_at(double t, double x) const {
  const std::array<double, 2> z{t, x};
  return a.evaluate(z);
}

std::array<double, 2> SecondOrderExample::da() const {
  const std::array<double, 2> z{t0, x0};
  return {a.derivative(kT).evaluate(z), a.derivative(kX).evaluate(z)};
}

double SecondOrderExample::a_tt() const {
  const std::array<double, 2> z{t0, x0};
  return a.derivative(kT).derivative(kT).evaluate(z);
}

int oleinik_loss_count(const SecondOrderExample& ex, double tol) {
  const auto d = ex.da();
  if (std::abs(ex.a_at(ex.t0, ex.x0)) > tol || std::abs(d[0]) > tol || std::abs(d[1]) > tol) {
    throw InvalidInput("loss count needs a(z0) = da(z0) = 0");
  }
  const double att = ex.a_tt();
  const double b1 = std::abs(ex.b1(ex.t0, ex.x0));
  if (att <= tol) {
    if (b1 > tol) {
      throw IllPosedCase("a(z0) = da(z0) = a_tt(z0) = 0 with b1(z0) != 0: not well posed");
    }
    throw DegenerateCase("a_tt(z0) = " + std::to_string(att) + ": loss formula does not apply");
  }
  return 3 + 2 * static_cast<int>(std::floor(1.5 + b1 / std::sqrt(att)));
}

double SecondOrderTrajectory::sup() const {
  double m = 0;
  for (const auto& v : u) m = std::max(m, std::abs(v));
  return m;
}

SecondOrderTrajectory simulate_second_order(const SecondOrderExample& ex, double xi,
                                            const SecondOrderOptions& opt) {
  if (!(opt.t_end > opt.t_begin)) throw InvalidInput("second-order interval is empty");
  if (opt.samples < 2) throw InvalidInput("need at least 2 output samples");
  const double x0 = ex.x0;
  const double xi2 = xi * xi;
  const cplx I{0, 1};
  auto rhs = [&](double t, const State<4>& y, State<4>& dy) {
    const cplx u{y[0], y[1]}, v{y[2], y[3]};
    const cplx w = -ex.a_at(t, x0) * xi2 * u - I * ex.b0(t, x0) * v +
                   ex.b1(t, x0) * xi * u + ex.c(t, x0) * u;
    dy = {y[2], y[3], w.real(), w.imag()};
  };
  DopriOptions dop;
  dop.rtol = opt.rtol;
  dop.atol = opt.atol;
  dop.max_steps = opt.max_steps;
  SecondOrderTrajectory tr;
  tr.xi = xi;
  DenseOutput<4> dense;
  State<4> y0{opt.data[0].real(), opt.data[0].imag(), opt.data[1].real(), opt.data[1].imag()};
  dopri_integrate<4>(rhs, opt.t_begin, opt.t_end, y0, dop, &dense, &tr.stats);
  tr.times = uniform_grid(opt.t_begin, opt.t_end, opt.samples);
  for (double t : tr.times) {
    const auto y = dense.value(t);
    tr.u.emplace_back(y[0], y[1]);
    tr.du.emplace_back(y[2], y[3]);
  }
  return tr;
}

std::vector<SecondOrderTrajectory> simulate_second_order(const SecondOrderExample& ex,
                                                         std::span<const double> xis,
                                                         const SecondOrderOptions& opt,
                                                         std::size_t workers) {
  return parallel_map(xis.size(), workers,
                      [&](std::size_t i) { return simulate_second_order(ex, xis[i], opt); });
}

std::string to_string(GrowthVerdict v) {
  return v == GrowthVerdict::PolynomialLoss ? "PolynomialLoss" : "SuperPolynomial";
}

namespace {

struct LinearFit {
  Eigen::VectorXd beta;
  double sse = 0;
};

LinearFit least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  LinearFit f;
  f.beta = A.colPivHouseholderQr().solve(y);
  f.sse = (A * f.beta - y).squaredNorm();
  return f;
}

PolynomialFit fit_polynomial(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) {
  Eigen::MatrixXd A(X.size(), 2);
  A.col(0) = X;
  A.col(1).setOnes();
  const auto f = least_squares(A, Y);
  return {f.beta(0), f.beta(1), f.sse};
}

ExponentialFit fit_exponential(const Eigen::VectorXd& xi, const Eigen::VectorXd& X,
                               const Eigen::VectorXd& Y, double lo, double hi) {
  auto at = [&](double sigma) {
    Eigen::MatrixXd A(X.size(), 3);
    A.col(0) = xi.array().pow(sigma);
    A.col(1) = X;
    A.col(2).setOnes();
    const auto f = least_squares(A, Y);
    return ExponentialFit{f.beta(0), sigma, f.beta(1), f.beta(2), f.sse};
  };
  const int scan = 96;
  const double llo = std::log(lo), lhi = std::log(hi);
  ExponentialFit best = at(lo);
  int ibest = 0;
  for (int i = 1; i <= scan; ++i) {
    const auto f = at(std::exp(llo + (lhi - llo) * i / scan));
    if (f.sse < best.sse) {
      best = f;
      ibest = i;
    }
  }
  // Golden-section refinement in log sigma around the best scan node.
  double a = llo + (lhi - llo) * std::max(0, ibest - 1) / scan;
  double b = llo + (lhi - llo) * std::min(scan, ibest + 1) / scan;
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = b - g * (b - a), d = a + g * (b - a);
  auto fc = at(std::exp(c)), fd = at(std::exp(d));
  for (int it = 0; it < 60; ++it) {
    if (fc.sse < fd.sse) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = at(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = at(std::exp(d));
    }
  }
  for (const auto* f : {&fc, &fd}) {
    if (f->sse < best.sse) best = *f;
  }
  return best;
}

}  // namespace

GrowthReport growth_fit(std::span<const double> xi, std::span<const double> magnitude,
                        const GrowthFitOptions& opt) {
  if (xi.size() != magnitude.size()) throw InvalidInput("growth_fit: size mismatch");
  if (xi.size() < std::max<std::size_t>(opt.min_points, 4)) {
    throw InsufficientData("growth_fit needs at least " + std::to_string(opt.min_points) +
                           " points, got " + std::to_string(xi.size()));
  }
  std::vector<std::size_t> order(xi.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return xi[i] < xi[j]; });
  GrowthReport r;
  for (auto i : order) {
    if (!(xi[i] > 0) || !(magnitude[i] > 0) || !std::isfinite(magnitude[i])) {
      throw InsufficientData("growth_fit needs positive finite |xi| and magnitudes");
    }
    r.xi.push_back(xi[i]);
    r.magnitude.push_back(magnitude[i]);
  }
  const auto n = static_cast<Eigen::Index>(r.xi.size());
  Eigen::VectorXd XI(n), X(n), Y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    XI(i) = r.xi[static_cast<std::size_t>(i)];
    X(i) = std::log(XI(i));
    Y(i) = std::log(r.magnitude[static_cast<std::size_t>(i)]);
  }
  r.poly = fit_polynomial(X, Y);
  r.expo = fit_exponential(XI, X, Y, opt.sigma_lo, opt.sigma_hi);
  r.k = r.poly.k;
  const double floor = 1e-24 * (1.0 + Y.squaredNorm());
  r.sse_ratio = r.poly.sse / std::max(r.expo.sse, floor);

  // Polynomial fit below the top decade, extrapolated into it.
  Eigen::Index m = 0;
  while (m < n && XI(m) < XI(n - 1) / 10) ++m;
  if (m < 3) m = n - 1;
  const auto lower = fit_polynomial(X.head(m), Y.head(m));
  r.extrapolation_gap = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = m; i < n; ++i) {
    r.extrapolation_gap = std::max(r.extrapolation_gap,
                                   (Y(i) - (lower.k * X(i) + lower.c0)) / std::log(10.0));
  }

  const bool super = r.sse_ratio >= opt.selection_ratio && r.expo.c > 0 &&
                     r.extrapolation_gap >= std::log10(opt.selection_ratio);
  r.verdict = super ? GrowthVerdict::SuperPolynomial : GrowthVerdict::PolynomialLoss;
  return r;
}

double exponent_spread(const GrowthReport& r, std::size_t window) {
  if (window < 2 || window > r.xi.size()) throw InvalidInput("exponent_spread: bad window");
  double spread = 0;
  for (std::size_t s = 0; s + window <= r.xi.size(); ++s) {
    const auto w = static_cast<Eigen::Index>(window);
    Eigen::VectorXd X(w), Y(w);
    for (Eigen::Index i = 0; i < w; ++i) {
      X(i) = std::log(r.xi[s + static_cast<std::size_t>(i)]);
      Y(i) = std::log(r.magnitude[s + static_cast<std::size_t>(i)]);
    }
    spread = std::max(spread, std::abs(fit_polynomial(X, Y).k - r.k));
  }
  return spread;
}

GrowthReport probe_model_operator(std::shared_ptr<const ModelOperator> op,
                                  const ProbeOptions& opt, std::size_t workers,
                                  const GrowthFitOptions& fit) {
  if (!op) throw InvalidInput("probe needs an operator");
  if (opt.last_octave < opt.first_octave) throw InvalidInput("probe: empty octave range");
  const auto dirs = unit_directions(op->layout.n, opt.directions);
  std::vector<ModeProblem> modes;
  std::vector<double> radii;
  for (int k = opt.first_octave; k <= opt.last_octave; ++k) {
    const double r = std::exp2(k);
    radii.push_back(r);
    for (const auto& d : dirs) {
      ModeProblem p;
      p.op = op;
      p.xi = d;
      for (auto& v : p.xi) v *= r;
      p.t0 = opt.t0;
      p.T = opt.T;
      p.data = opt.data;
      p.forcing = Forcing::expression({{opt.forcing, 0, 0.0}});
      modes.push_back(std::move(p));
    }
  }
  IntegrateOptions io;
  io.rtol = opt.rtol;
  io.atol = opt.atol;
  io.samples = opt.samples;
  io.keep_dense = false;
  const auto res = sweep(modes, io, workers);
  std::string failures;
  std::vector<double> mag(radii.size(), 0.0);
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (!res[i].ok()) {
      failures += (failures.empty() ? "" : "; ") + res[i].error_kind + " at |xi| = " +
                  std::to_string(radii[i / dirs.size()]) + ": " + res[i].error;
      continue;
    }
    double m = 0;
    for (const auto& v : res[i].trajectory->u) m = std::max(m, std::abs(v));
    mag[i / dirs.size()] = std::max(mag[i / dirs.size()], m);
  }
  if (!failures.empty()) throw Error("probe sweep failed: " + failures);
  return growth_fit(radii, mag, fit);
}

GrowthReport probe_second_order(const SecondOrderExample& ex, int first_octave,
                                int last_octave, const SecondOrderOptions& opt,
                                std::size_t workers, const GrowthFitOptions& fit) {
  if (last_octave < first_octave) throw InvalidInput("probe: empty octave range");
  std::vector<double> xis, radii;
  for (int k = first_octave; k <= last_octave; ++k) {
    radii.push_back(std::exp2(k));
    xis.push_back(std::exp2(k));
    xis.push_back(-std::exp2(k));
  }
  const auto trs = simulate_second_order(ex, xis, opt, workers);
  std::vector<double> mag(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    mag[i] = std::max(trs[2 * i].sup(), trs[2 * i + 1].sup());
  }
  return growth_fit(radii, mag, fit);
}

}  // namespace trichar
