#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trichar/polynomial.hpp"
#include "trichar/symbol_core.hpp"

namespace trichar {

/// A point of T*(R^{n+1}) with x_0 = t and xi_0 = tau.
struct PhasePoint {
  std::vector<double> x;   ///< length n + 1
  std::vector<double> xi;  ///< length n + 1

  std::vector<double> to_vars(const PhaseLayout& l) const;
  static PhasePoint from_vars(const PhaseLayout& l, std::span<const double> z);
};

/// Principal symbol p_m together with the order m - 1 part (complex).
struct FullSymbol {
  PhaseLayout layout;
  int order = 0;
  Polynomial principal;
  Polynomial lower_re;
  Polynomial lower_im;

  static FullSymbol from_model(const ModelOperator& op);
};

/// Closed-form gradient and Hessian of a polynomial at z.
std::vector<double> gradient(const Polynomial& p, std::span<const double> z);
Eigen::MatrixXd hessian(const Polynomial& p, std::span<const double> z);
/// Central differences with step rel_step * max(1, |z_i|); cross-check only.
Eigen::MatrixXd hessian_fd(const Polynomial& p, std::span<const double> z,
                           double rel_step = 1e-5);

/// Points (0, x, 0, xi) from the grid where |p| <= tol and |dp| <= tol.
std::vector<PhasePoint> critical_points_on_t0(
    const Polynomial& p, const PhaseLayout& layout, std::span<const double> x,
    std::span<const std::vector<double>> xi_grid, double tol = 1e-9);
std::vector<PhasePoint> critical_points_on_t0(
    const ModelOperator& op, std::span<const double> x,
    std::span<const std::vector<double>> xi_grid, double tol = 1e-9);

struct FundamentalMatrix {
  Eigen::MatrixXd entries;  ///< [[p_xi_x, p_xi_xi], [-p_x_x, -p_x_xi]]
  PhasePoint basepoint;
};

/// F = [[0, I], [-I, 0]] * H for a Hessian H ordered (x, xi).
Eigen::MatrixXd fundamental_from_hessian(const Eigen::MatrixXd& H);

/// Throws NotCritical if |dp(z)| > tol.
FundamentalMatrix fundamental_matrix(const Polynomial& p,
                                     const PhaseLayout& layout,
                                     const PhasePoint& z, double tol = 1e-9);
FundamentalMatrix fundamental_matrix_fd(const Polynomial& p,
                                        const PhaseLayout& layout,
                                        const PhasePoint& z);

enum class Verdict { EffectivelyHyperbolic, NotEffectivelyHyperbolic };
std::string to_string(Verdict v);

/// |Re mu| <= kSnapTol * ||F|| counts as purely imaginary.
inline constexpr double kSnapTol = 1e-8;
/// The real pair must sit this far (relative to ||F||) from every other
/// eigenvalue.
inline constexpr double kSimpleSeparation = 1e-6;
/// Eigenvector-matrix condition number above which the report is flagged.
inline constexpr double kIllConditioned = 1e10;

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;  ///< snapped, sorted
  std::optional<double> real_pair;  ///< mu > 0 of the pair (mu, -mu)
  Verdict verdict = Verdict::NotEffectivelyHyperbolic;
  double norm = 0;                  ///< Frobenius norm of F
  double symmetry_residual = 0;     ///< quadruple symmetry, relative to ||F||
  double hamiltonian_residual = 0;  ///< ||JF - (JF)^T|| / ||F||
  double eigvec_condition = 1;
  bool ill_conditioned = false;
  bool purely_imaginary = false;    ///< every eigenvalue has Re = 0
};

SpectrumReport classify_spectrum(const Eigen::MatrixXd& F);
inline SpectrumReport classify_spectrum(const FundamentalMatrix& F) {
  return classify_spectrum(F.entries);
}

struct SubprincipalValue {
  std::complex<double> value;  ///< p_{m-1} + (i/2) sum_j d2 p_m / dx_j dxi_j
  double time_trace = 0;       ///< j = 0 term (t, tau)
  double spatial_trace = 0;    ///< j >= 1 terms
};

/// Throws NotCritical off Sigma_1(p_m).
SubprincipalValue subprincipal_symbol(const FullSymbol& sym,
                                      const PhasePoint& z, double tol = 1e-9);

enum class ConditionStatus { ConditionsVacuous, Evaluated, SpectrumNotHyperbolic };
std::string to_string(ConditionStatus s);

struct NecessaryConditionsReport {
  ConditionStatus status = ConditionStatus::Evaluated;
  SpectrumReport spectrum;
  SubprincipalValue subprincipal;
  bool im_pass = true;
  double im_margin = 0;     ///< tol - |Im p'|
  bool levi_pass = true;
  double quarter_sum = 0;   ///< (1/4) sum |mu_j|
  double levi_margin = 0;   ///< quarter_sum - |Re p'|
};

NecessaryConditionsReport check_necessary_conditions(const FullSymbol& sym,
                                                     const PhasePoint& z,
                                                     double tol = 1e-9);

}  // namespace trichar
