#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "trichar/grids.hpp"
#include "trichar/polynomial.hpp"
#include "trichar/symbol_core.hpp"

namespace trichar::testing {

inline Polynomial::Exponents zero_exp(const PhaseLayout& l) {
  return Polynomial::Exponents(l.nvars(), 0);
}

/// sum_j c_j xi_j
inline Polynomial xi_linear(const PhaseLayout& l, const std::vector<double>& c) {
  Polynomial p(l.nvars());
  for (std::size_t j = 0; j < l.n; ++j) {
    auto e = zero_exp(l);
    e[l.xi(j)] = 1;
    p.add_term(e, c[j]);
  }
  return p;
}

/// xi^T M xi for a symmetric n x n matrix M.
inline Polynomial xi_quadratic(const PhaseLayout& l, const Eigen::MatrixXd& M) {
  Polynomial p(l.nvars());
  for (std::size_t i = 0; i < l.n; ++i) {
    for (std::size_t j = 0; j < l.n; ++j) {
      auto e = zero_exp(l);
      e[l.xi(i)] += 1;
      e[l.xi(j)] += 1;
      p.add_term(e, M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  return p;
}

inline Polynomial xi_norm_sq(const PhaseLayout& l, double scale = 1.0) {
  return xi_quadratic(l, scale * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(l.n),
                                                           static_cast<Eigen::Index>(l.n)));
}

/// Cubic form sum c_{ijk} xi_i xi_j xi_k with random coefficients.
inline Polynomial xi_cubic_random(const PhaseLayout& l, Rng& rng, double amp) {
  Polynomial p(l.nvars());
  for (std::size_t i = 0; i < l.n; ++i)
    for (std::size_t j = i; j < l.n; ++j)
      for (std::size_t k = j; k < l.n; ++k) {
        auto e = zero_exp(l);
        e[l.xi(i)] += 1;
        e[l.xi(j)] += 1;
        e[l.xi(k)] += 1;
        p.add_term(e, rng.uniform(-amp, amp));
      }
  return p;
}

inline Polynomial var(const PhaseLayout& l, std::size_t i) {
  return Polynomial::variable(l.nvars(), i);
}

/// a1 = a3 = 0, a2 = |xi|^2, b = beta |xi|^2.
inline ModelOperator simple_operator(std::size_t n, double beta = 0.0) {
  auto op = ModelOperator::zero(n);
  op.a2.poly = xi_norm_sq(op.layout);
  if (beta != 0.0) op.b.poly = xi_norm_sq(op.layout, beta);
  return op;
}

/// Random model operator with a2 >= delta0 |xi|^2, t- and x-dependent a1, a3.
inline ModelOperator random_operator(std::size_t n, Rng& rng) {
  auto op = ModelOperator::zero(n);
  const auto& l = op.layout;
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd R(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) R(i, j) = rng.uniform(-0.4, 0.4);
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(N, N) + 0.5 * (R + R.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues()(0);
  if (lmin < 0.5) M += (0.5 - lmin) * Eigen::MatrixXd::Identity(N, N);
  op.a2.poly = xi_quadratic(l, M);
  op.delta0 = 0.5;
  std::vector<double> c(n);
  for (auto& v : c) v = rng.uniform(-1, 1);
  op.a1.poly = xi_linear(l, c) + var(l, PhaseLayout::t()) * xi_linear(l, c) * 0.5;
  op.a3.poly = xi_cubic_random(l, rng, 1.0) +
               var(l, l.x(0)) * xi_cubic_random(l, rng, 0.3);
  return op;
}

inline std::vector<double> random_unit(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  double s = 0;
  do {
    s = 0;
    for (auto& v : w) {
      v = rng.uniform(-1, 1);
      s += v * v;
    }
  } while (s < 1e-4 || s > 1);
  for (auto& v : w) v /= std::sqrt(s);
  return w;
}

/// Companion-matrix eigenvalues of tau^3 + A tau^2 + B tau + C.
inline std::vector<std::complex<double>> companion_roots(double A, double B, double C) {
  Eigen::Matrix3d M;
  M << -A, -B, -C, 1, 0, 0, 0, 1, 0;
  Eigen::EigenSolver<Eigen::Matrix3d> es(M);
  std::vector<std::complex<double>> r;
  for (int i = 0; i < 3; ++i) r.push_back(es.eigenvalues()(i));
  return r;
}

/// Max over sorted pairs of |a_i - b_i| / scale.
inline double set_distance(std::vector<double> a, std::vector<double> b, double scale) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d / scale;
}

}  // namespace trichar::testing
