#include "trichar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "trichar/errors.hpp"

namespace trichar {

std::vector<double> PhasePoint::to_vars(const PhaseLayout& l) const {
  if (x.size() != l.n + 1 || xi.size() != l.n + 1) {
    throw InvalidInput("phase point dimension does not match layout");
  }
  std::vector<double> z(l.nvars());
  for (std::size_t i = 0; i <= l.n; ++i) {
    z[l.position(i)] = x[i];
    z[l.covariable(i)] = xi[i];
  }
  return z;
}

PhasePoint PhasePoint::from_vars(const PhaseLayout& l, std::span<const double> z) {
  PhasePoint p;
  p.x.resize(l.n + 1);
  p.xi.resize(l.n + 1);
  for (std::size_t i = 0; i <= l.n; ++i) {
    p.x[i] = z[l.position(i)];
    p.xi[i] = z[l.covariable(i)];
  }
  return p;
}

FullSymbol FullSymbol::from_model(const ModelOperator& op) {
  FullSymbol s;
  s.layout = op.layout;
  s.order = 3;
  s.principal = op.principal_symbol();
  s.lower_re = op.second_order_part();
  s.lower_im = Polynomial(op.layout.nvars());
  return s;
}

std::vector<double> gradient(const Polynomial& p, std::span<const double> z) {
  std::vector<double> g(p.nvars());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = p.derivative(i).evaluate(z);
  return g;
}

Eigen::MatrixXd hessian(const Polynomial& p, std::span<const double> z) {
  const auto n = static_cast<Eigen::Index>(p.nvars());
  Eigen::MatrixXd H(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Polynomial di = p.derivative(static_cast<std::size_t>(i));
    for (Eigen::Index j = i; j < n; ++j) {
      H(i, j) = H(j, i) = di.derivative(static_cast<std::size_t>(j)).evaluate(z);
    }
  }
  return H;
}

Eigen::MatrixXd hessian_fd(const Polynomial& p, std::span<const double> z,
                           double rel_step) {
  const std::size_t n = p.nvars();
  Eigen::MatrixXd H(n, n);
  std::vector<double> w(z.begin(), z.end());
  auto eval = [&](std::size_t i, double di, std::size_t j, double dj) {
    w.assign(z.begin(), z.end());
    w[i] += di;
    w[j] += dj;
    return p.evaluate(w);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double hi = rel_step * std::max(1.0, std::abs(z[i]));
    for (std::size_t j = i; j < n; ++j) {
      const double hj = rel_step * std::max(1.0, std::abs(z[j]));
      double v;
      if (i == j) {
        w.assign(z.begin(), z.end());
        const double f0 = p.evaluate(w);
        v = (eval(i, hi, i, 0) - 2 * f0 + eval(i, -hi, i, 0)) / (hi * hi);
      } else {
        v = (eval(i, hi, j, hj) - eval(i, hi, j, -hj) - eval(i, -hi, j, hj) +
             eval(i, -hi, j, -hj)) /
            (4 * hi * hj);
      }
      H(i, j) = H(j, i) = v;
    }
  }
  return H;
}

std::vector<PhasePoint> critical_points_on_t0(
    const Polynomial& p, const PhaseLayout& layout, std::span<const double> x,
    std::span<const std::vector<double>> xi_grid, double tol) {
  if (x.size() != layout.n) throw InvalidInput("critical_points_on_t0: x has wrong dimension");
  std::vector<PhasePoint> out;
  std::vector<Polynomial> grad;
  for (std::size_t i = 0; i < layout.nvars(); ++i) grad.push_back(p.derivative(i));
  for (const auto& xi : xi_grid) {
    if (xi.size() != layout.n) throw InvalidInput("critical_points_on_t0: xi has wrong dimension");
    PhasePoint z;
    z.x.assign(1, 0.0);
    z.x.insert(z.x.end(), x.begin(), x.end());
    z.xi.assign(1, 0.0);
    z.xi.insert(z.xi.end(), xi.begin(), xi.end());
    const auto vars = z.to_vars(layout);
    if (std::abs(p.evaluate(vars)) > tol) continue;
    double g2 = 0;
    for (const auto& g : grad) {
      const double v = g.evaluate(vars);
      g2 += v * v;
    }
    if (std::sqrt(g2) <= tol) out.push_back(std::move(z));
  }
  return out;
}

std::vector<PhasePoint> critical_points_on_t0(
    const ModelOperator& op, std::span<const double> x,
    std::span<const std::vector<double>> xi_grid, double tol) {
  return critical_points_on_t0(op.principal_symbol(), op.layout, x, xi_grid, tol);
}

Eigen::MatrixXd fundamental_from_hessian(const Eigen::MatrixXd& H) {
  const Eigen::Index d = H.rows() / 2;
  Eigen::MatrixXd F(H.rows(), H.cols());
  // Rows for dx/ds = p_xi, rows for dxi/ds = -p_x.
  F.topRows(d) = H.bottomRows(d);
  F.bottomRows(d) = -H.topRows(d);
  return F;
}

namespace {

void require_critical(const Polynomial& p, std::span<const double> z,
                      double tol) {
  const auto g = gradient(p, z);
  double g2 = 0;
  for (double v : g) g2 += v * v;
  const double gn = std::sqrt(g2);
  if (gn > tol || std::abs(p.evaluate(z)) > tol) {
    throw NotCritical(gn, "fundamental matrix basepoint");
  }
}

}  // namespace

FundamentalMatrix fundamental_matrix(const Polynomial& p,
                                     const PhaseLayout& layout,
                                     const PhasePoint& z, double tol) {
  const auto vars = z.to_vars(layout);
  require_critical(p, vars, tol);
  return FundamentalMatrix{fundamental_from_hessian(hessian(p, vars)), z};
}

FundamentalMatrix fundamental_matrix_fd(const Polynomial& p,
                                        const PhaseLayout& layout,
                                        const PhasePoint& z) {
  const auto vars = z.to_vars(layout);
  return FundamentalMatrix{fundamental_from_hessian(hessian_fd(p, vars)), z};
}

std::string to_string(Verdict v) {
  return v == Verdict::EffectivelyHyperbolic ? "EffectivelyHyperbolic"
                                             : "NotEffectivelyHyperbolic";
}

std::string to_string(ConditionStatus s) {
  switch (s) {
    case ConditionStatus::ConditionsVacuous: return "ConditionsVacuous";
    case ConditionStatus::Evaluated: return "Evaluated";
    case ConditionStatus::SpectrumNotHyperbolic: return "SpectrumNotHyperbolic";
  }
  return "?";
}

SpectrumReport classify_spectrum(const Eigen::MatrixXd& F) {
  SpectrumReport rep;
  const Eigen::Index dim = F.rows();
  rep.norm = F.norm();
  if (dim == 0) return rep;
  const Eigen::Index d = dim / 2;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
  J.topRightCorner(d, d).setIdentity();
  J.bottomLeftCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd JF = J * F;
  rep.hamiltonian_residual =
      rep.norm > 0 ? (JF - JF.transpose()).norm() / rep.norm : 0.0;

  if (rep.norm == 0.0) {
    rep.eigenvalues.assign(static_cast<std::size_t>(dim), {0.0, 0.0});
    rep.purely_imaginary = true;
    return rep;
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(F, true);
  const double snap = kSnapTol * rep.norm;
  std::vector<std::complex<double>> ev;
  for (Eigen::Index i = 0; i < dim; ++i) {
    std::complex<double> mu = es.eigenvalues()(i);
    double re = std::abs(mu.real()) <= snap ? 0.0 : mu.real();
    double im = std::abs(mu.imag()) <= snap ? 0.0 : mu.imag();
    ev.emplace_back(re, im);
  }
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  rep.eigenvalues = ev;

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  rep.eigvec_condition = smin > 0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  rep.ill_conditioned = !(rep.eigvec_condition <= kIllConditioned);

  double sym = 0;
  for (const auto& mu : ev) {
    for (const auto& target : {-mu, std::conj(mu), -std::conj(mu)}) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& nu : ev) best = std::min(best, std::abs(nu - target));
      sym = std::max(sym, best);
    }
  }
  rep.symmetry_residual = sym / rep.norm;

  std::vector<std::size_t> real_idx;
  bool others_imaginary = true;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (ev[i].real() != 0.0 && ev[i].imag() == 0.0) {
      real_idx.push_back(i);
    } else if (ev[i].real() != 0.0) {
      others_imaginary = false;
    }
  }
  rep.purely_imaginary = real_idx.empty() && others_imaginary;

  if (real_idx.size() == 2 && others_imaginary) {
    const double a = ev[real_idx[0]].real(), b = ev[real_idx[1]].real();
    const double sep = kSimpleSeparation * rep.norm;
    bool ok = std::abs(a + b) <= snap && a * b < 0;
    for (std::size_t i = 0; i < ev.size() && ok; ++i) {
      if (i == real_idx[0] || i == real_idx[1]) continue;
      if (std::abs(ev[i] - ev[real_idx[0]]) <= sep ||
          std::abs(ev[i] - ev[real_idx[1]]) <= sep) {
        ok = false;
      }
    }
    if (ok) {
      rep.real_pair = std::max(a, b);
      rep.verdict = Verdict::EffectivelyHyperbolic;
    }
  }
  return rep;
}

SubprincipalValue subprincipal_symbol(const FullSymbol& sym,
                                      const PhasePoint& z, double tol) {
  const auto vars = z.to_vars(sym.layout);
  require_critical(sym.principal, vars, tol);
  SubprincipalValue out;
  for (std::size_t j = 0; j <= sym.layout.n; ++j) {
    const double v = sym.principal.derivative(sym.layout.position(j))
                         .derivative(sym.layout.covariable(j))
                         .evaluate(vars);
    (j == 0 ? out.time_trace : out.spatial_trace) += v;
  }
  const double re = sym.lower_re.is_zero() ? 0.0 : sym.lower_re.evaluate(vars);
  const double im = sym.lower_im.is_zero() ? 0.0 : sym.lower_im.evaluate(vars);
  out.value = {re, im + 0.5 * (out.time_trace + out.spatial_trace)};
  return out;
}

NecessaryConditionsReport check_necessary_conditions(const FullSymbol& sym,
                                                     const PhasePoint& z,
                                                     double tol) {
  NecessaryConditionsReport rep;
  const auto F = fundamental_matrix(sym.principal, sym.layout, z, tol);
  rep.spectrum = classify_spectrum(F);
  rep.subprincipal = subprincipal_symbol(sym, z, tol);
  for (const auto& mu : rep.spectrum.eigenvalues) rep.quarter_sum += std::abs(mu);
  rep.quarter_sum *= 0.25;
  if (rep.spectrum.verdict == Verdict::EffectivelyHyperbolic) {
    rep.status = ConditionStatus::ConditionsVacuous;
    return rep;
  }
  if (!rep.spectrum.purely_imaginary) {
    rep.status = ConditionStatus::SpectrumNotHyperbolic;
    return rep;
  }
  rep.status = ConditionStatus::Evaluated;
  const auto p = rep.subprincipal.value;
  const double scale = tol * (1.0 + std::abs(p));
  rep.im_margin = scale - std::abs(p.imag());
  rep.im_pass = rep.im_margin >= 0;
  rep.levi_margin = rep.quarter_sum - std::abs(p.real());
  rep.levi_pass = rep.levi_margin >= -scale;
  return rep;
}

}  // namespace trichar
