#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "trichar/polynomial.hpp"

namespace trichar {

/// A real symbol a_j(t, x, xi), homogeneous of order `degree` in xi, stored
/// as a polynomial over the phase layout (no tau dependence).
struct CoefficientSpec {
  PhaseLayout layout;
  int degree = 0;
  Polynomial poly;

  CoefficientSpec() = default;
  CoefficientSpec(PhaseLayout l, int deg)
      : layout(l), degree(deg), poly(l.nvars()) {}
  CoefficientSpec(PhaseLayout l, int deg, Polynomial p)
      : layout(l), degree(deg), poly(std::move(p)) {}

  double evaluate(double t, std::span<const double> x,
                  std::span<const double> xi) const;
  double evaluate(std::span<const double> z) const { return poly.evaluate(z); }

  bool is_zero() const { return poly.is_zero(); }
  bool time_independent() const { return poly.independent_of(PhaseLayout::t()); }

  /// Throws InvalidInput unless the polynomial is tau-free and homogeneous of
  /// order `degree` in xi.
  void validate(const std::string& name) const;

  bool operator==(const CoefficientSpec&) const = default;
};

/// Lower order data of the general third order operator
/// P = P_3 + B_2(t,x,D_x) + B_1(t,x,D_x) D_t + C(t,x,D_t,D_x).
struct LowerOrderData {
  CoefficientSpec B2;  ///< order 2 in xi
  CoefficientSpec B1;  ///< order 1 in xi, multiplies D_t
  Polynomial C;        ///< order <= 1 in (tau, xi)
  bool operator==(const LowerOrderData&) const = default;
};

/// P = D_t^3 + t a1 D_t^2 - t a2 D_t + t^2 a3 + b(t, D_x) (+ lower order data).
struct ModelOperator {
  PhaseLayout layout;
  CoefficientSpec a1;  // degree 1
  CoefficientSpec a2;  // degree 2
  CoefficientSpec a3;  // degree 3
  CoefficientSpec b;   // degree 2
  double delta0 = 1.0;
  LowerOrderData lower;

  /// All-zero operator of dimension n (a_j = b = 0).
  static ModelOperator zero(std::size_t n);

  std::size_t dim() const { return layout.n; }

  /// tau^3 + t a1 tau^2 - t a2 tau + t^2 a3 as a polynomial in phase space.
  Polynomial principal_symbol() const;
  /// p_2 = b + B2 + B1 tau, the order-2 part of the full symbol.
  Polynomial second_order_part() const;

  /// Degree/homogeneity checks for every coefficient; throws InvalidInput.
  void validate() const;

  bool operator==(const ModelOperator&) const = default;
};

/// Smallest a2(t, x, w)/|w|^2 over the given unit directions; compare
/// against delta0 for the ellipticity invariant.
double ellipticity_margin(const ModelOperator& op, double t,
                          std::span<const double> x,
                          std::span<const std::vector<double>> directions);

double principal_symbol(const ModelOperator& op, double t,
                        std::span<const double> x, double tau,
                        std::span<const double> xi);

/// tau^3 + A tau^2 + B tau + C at a symbol point: A = t a1, B = -t a2,
/// C = t^2 a3.
struct CubicCoefficients {
  double t = 0, a1 = 0, a2 = 0, a3 = 0;
  double A() const { return t * a1; }
  double B() const { return -t * a2; }
  double C() const { return t * t * a3; }
};

CubicCoefficients cubic_coefficients(const ModelOperator& op, double t,
                                     std::span<const double> x,
                                     std::span<const double> xi);

enum class RootBranch { trig, cardano_fallback };

struct CubicAnalysis {
  CubicCoefficients coefs;
  std::array<double, 3> lambda{};  ///< trig-formula order, not sorted
  double q = 0, r = 0, rho = 0, theta = 0, discriminant = 0;
  std::array<double, 3> delta{};
  RootBranch degenerate_flag = RootBranch::trig;
  double clamp_magnitude = 0;  ///< how far |r/rho| exceeded 1 before clamping
  double delta_identity_residual = 0;  ///< max_k |delta_k - prod (l_k - l_j)|
};

/// rho below this falls back to Newton + deflation on the depressed cubic.
inline constexpr double kRhoMin = 1e-30;
/// Default relative discriminant tolerance: Delta <= tol * (|q|^3 + r^2).
inline constexpr double kDiscriminantRelTol = 1e-12;

CubicAnalysis solve_cubic_trig(const CubicCoefficients& c,
                               double rel_tol = kDiscriminantRelTol);
CubicAnalysis solve_cubic_trig(const ModelOperator& op, double t,
                               std::span<const double> x,
                               std::span<const double> xi,
                               double rel_tol = kDiscriminantRelTol);

struct DiscriminantValue {
  double value = 0;               ///< Delta at xi / |xi|
  double xi_norm = 1;             ///< |xi| of the input
  double homogeneity_factor = 1;  ///< |xi|^6, Delta(xi) = factor * value
};

double discriminant(const CubicCoefficients& c);
DiscriminantValue discriminant(const ModelOperator& op, double t,
                               std::span<const double> x,
                               std::span<const double> xi);

/// delta_k = (3 tau^2 + 2 t a1 tau - t a2) at tau = lambda_k.
std::array<double, 3> delta_symbols(const CubicAnalysis& analysis);

struct Lemma2Row {
  double t = 0;
  double min_ratio = 0;       ///< min over directions, k of |delta_k| / (t a2)
  std::size_t argmin_direction = 0;
  double max_cos_deviation = 0;  ///< max |cos(theta/3) - sqrt(3)/2|
};

struct Lemma2Result {
  double gamma = 0;
  double gamma1 = 0;
  std::vector<Lemma2Row> table;
};

struct Lemma2Grid {
  std::size_t t_nodes = 200;                 ///< uniform in (0, t_max]
  std::vector<std::vector<double>> directions;  ///< unit covectors
};

/// Walks t upward through the grid; gamma1 is the last node before the scan
/// leaves the hyperbolic region or the ratio collapses, gamma the smallest
/// ratio seen up to gamma1. Throws ScanFailed if no positive gamma exists.
Lemma2Result lemma2_scan(const ModelOperator& op, std::span<const double> x,
                         double t_max, const Lemma2Grid& grid);

/// Largest t0 on a uniform grid of [0, t_max] such that Delta <= 0 at every
/// node up to t0 and every direction.
double hyperbolicity_limit(const ModelOperator& op, std::span<const double> x,
                           double t_max, std::size_t t_nodes,
                           std::span<const std::vector<double>> directions);

/// f(t, xi) = t + (1 + a)^{-1/3} for a = a2(xi).
double weight_f(double t, double a);
double weight_f(const ModelOperator& op, double t, std::span<const double> xi);
/// f^p, formed after f.
double weight_power(double t, double a, double p);
double weight_power(const ModelOperator& op, double t,
                    std::span<const double> xi, double p);

struct AlphaGrid {
  std::vector<double> t_values;  ///< within [0, 1]
  std::vector<double> a_values;  ///< a2(xi) >= 0
};

struct AlphaResult {
  double alpha = 0;  ///< min over grid of (1/(1+a) + t f^2) / f^3
  double argmin_t = 0, argmin_a = 0;
  std::size_t nodes = 0;
  std::size_t violations_third = 0;  ///< nodes where alpha = 1/3 fails beyond tol
  std::size_t f_upper_violations = 0;  ///< f^-1 > (1+a)^{1/3}
  std::size_t f_lower_violations = 0;  ///< f^-1 < 1/2 for t < 1
};

/// Largest alpha in 1/(1+a) + t f^2 >= alpha f^3 validated on the grid, plus
/// the weight bounds on the same grid.
AlphaResult weight_inequality_alpha(const AlphaGrid& grid, double tol = 1e-12);

/// a2 values of the operator over xi samples, for building an AlphaGrid.
std::vector<double> a2_values(const ModelOperator& op,
                              std::span<const std::vector<double>> xis);

/// Worst relative violation of alpha f^{-2N} a <= t a f^{-2N-1} + f^{-2N-3};
/// <= 0 means the consequence holds at every node.
double weight_consequence_violation(const AlphaGrid& grid, double alpha, int N);

}  // namespace trichar
