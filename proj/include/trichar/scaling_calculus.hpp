#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trichar/symbol_core.hpp"

namespace trichar {

/// Exponent p/q in lowest terms, q > 0.
struct Rational {
  long num = 0, den = 1;
  Rational() = default;
  Rational(long n, long d = 1);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
  bool operator==(const Rational&) const = default;
  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend bool operator<(Rational a, Rational b);
};

/// t = eps^{2/3} s, x = eps y, eps in (0, 1].
struct ScalingTransform {
  double epsilon = 1.0;
  double pow(Rational e) const;
};

/// One coefficient of eps^2 P after the substitution:
/// eps^{prefactor} * coefficient(s, y, sigma, eta).
struct RescaledTerm {
  std::string name;    ///< a1, a2, a3, b, B2, B1, C
  Rational prefactor;  ///< exponent of eps in front of the term
  Polynomial coefficient;
};

struct RescaledOperator {
  ScalingTransform transform;
  std::vector<RescaledTerm> terms;
  ModelOperator op;  ///< prefactors multiplied in, variables renamed (s, y, sigma, eta)

  const RescaledTerm& term(const std::string& name) const;
  /// Term names grouped by prefactor in increasing order.
  std::vector<std::pair<Rational, std::vector<std::string>>> groups() const;
};

/// Exponent of eps in front of a monomial t^i tau^j xi^alpha after the
/// substitution and multiplication by eps^2: 2 + 2i/3 - 2j/3 - |alpha|.
Rational monomial_prefactor(int t_power, int tau_power, int xi_degree);

/// Throws InvalidInput unless 0 < eps <= 1. The lower-order C carries
/// prefactor eps with the remaining powers of eps inside its coefficient.
RescaledOperator rescale_operator(const ModelOperator& op, double epsilon);

/// m_N^{t, mu}(x, xi) = f^{-N}(t, x, xi) <xi>^{mu/2}, f = t + (1 + a2)^{-1/3}.
struct OrderFunction {
  const ModelOperator* op = nullptr;
  int N = 0;
  double mu = 0;
  double operator()(double t, std::span<const double> x, std::span<const double> xi) const;
};
double order_function_eval(const OrderFunction& of, double t, std::span<const double> x,
                           std::span<const double> xi);

enum class Metric { G, GEpsilon };
std::string to_string(Metric m);

/// g = |dx|^2 + <xi>^{-2} |dxi|^2, g^eps = eps^2 |dx|^2 + <xi>^{-2} |dxi|^2
/// at basepoint xi.
double metric_eval(Metric which, std::span<const double> xi, std::span<const double> dx,
                   std::span<const double> dxi, double epsilon = 1.0);

/// Heuristic diagnostics on random samples; they support but do not prove
/// symbol-class membership.
struct SlowVariationReport {
  std::size_t samples = 0;
  double max_ratio = 0;  ///< max of m(x, xi) / m(x', xi') over g-distance <= 1
  double min_ratio = 0;
};
SlowVariationReport slow_variation_check(const OrderFunction& of, double t,
                                         std::size_t samples, std::uint64_t seed,
                                         double xi_max = 1e3);

/// max over samples of |d_xi^alpha f^{-N}| <xi>^{|alpha|} / m_N^{t,0}, per
/// order |alpha| = 0, 1, 2 (central differences).
struct DerivativeQuotients {
  double order[3] = {0, 0, 0};
};
DerivativeQuotients derivative_quotients(const ModelOperator& op, int N, double t,
                                         std::size_t samples, std::uint64_t seed,
                                         double xi_max = 1e3);

/// eps = O(1/N): with one side given the other follows from eps N = c
/// (N rounded down, must be >= 1); with both, throws InvalidInput when
/// eps N > c. Throws InvalidInput when neither is given.
struct Coupling {
  double epsilon = 1;
  int N = 1;
};
Coupling resolve_coupling(std::optional<double> epsilon, std::optional<int> N,
                          double coupling_constant = 1.0);

}  // namespace trichar
