#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace trichar {

/// Variable layout of the cotangent bundle T*(R^{n+1}) used by every symbol
/// in the library: z = (t, x_1..x_n, tau, xi_1..xi_n), i.e. x_0 = t and
/// xi_0 = tau.
struct PhaseLayout {
  std::size_t n = 1;  ///< spatial dimension

  std::size_t nvars() const { return 2 * (n + 1); }
  static constexpr std::size_t t() { return 0; }
  std::size_t x(std::size_t j) const { return 1 + j; }  // j in [0, n)
  std::size_t tau() const { return n + 1; }
  std::size_t xi(std::size_t j) const { return n + 2 + j; }  // j in [0, n)
  /// Position index i in [0, n] (0 = t) -> variable index.
  std::size_t position(std::size_t i) const { return i; }
  /// Covariable index i in [0, n] (0 = tau) -> variable index.
  std::size_t covariable(std::size_t i) const { return n + 1 + i; }

  bool operator==(const PhaseLayout&) const = default;
};

/// Sparse real polynomial in a fixed number of variables. Terms are kept in
/// canonical (sorted, zero-free) form so that equality and iteration order
/// are deterministic.
class Polynomial {
 public:
  using Exponents = std::vector<int>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, double c);
  static Polynomial variable(std::size_t nvars, std::size_t index);
  static Polynomial monomial(Exponents exponents, double coef);

  std::size_t nvars() const { return nvars_; }
  const std::map<Exponents, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Exponents& exponents, double coef);

  double evaluate(std::span<const double> z) const;

  Polynomial derivative(std::size_t var) const;

  /// Substitutes z_i -> factors[i] * z_i.
  Polynomial scale_variables(std::span<const double> factors) const;

  /// Substitutes z_var -> value, leaving the variable slot with exponent 0.
  Polynomial fix_variable(std::size_t var, double value) const;

  /// Dense coefficients c_k of sum_k c_k z_var^k, after every other variable
  /// is fixed from `z`.
  std::vector<double> univariate(std::size_t var,
                                 std::span<const double> z) const;

  /// Total degree over the listed variables; -1 for the zero polynomial.
  int max_degree_in(std::span<const std::size_t> vars) const;
  /// True when every term has exactly `degree` total degree over `vars`.
  bool homogeneous_in(std::span<const std::size_t> vars, int degree) const;
  /// True when no term involves `var`.
  bool independent_of(std::size_t var) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double c) { return a *= c; }
  friend Polynomial operator*(double c, Polynomial a) { return a *= c; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  bool operator==(const Polynomial&) const = default;

  /// Largest |coefficient| difference against `other`.
  double max_coef_distance(const Polynomial& other) const;

  std::string to_string() const;

 private:
  std::size_t nvars_ = 0;
  std::map<Exponents, double> terms_;
};

/// Horner evaluation of sum_k c[k] s^k.
double horner(std::span<const double> coefs, double s);

}  // namespace trichar
