#pragma once

#include <array>
#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trichar/dopri.hpp"
#include "trichar/polynomial.hpp"
#include "trichar/symbol_core.hpp"

namespace trichar {

using cplx = std::complex<double>;

/// Complex coefficient re + i im, each a polynomial in (t, x).
struct ComplexCoef {
  Polynomial re{2}, im{2};
  cplx operator()(double t, double x) const;
  bool operator==(const ComplexCoef&) const = default;
};

/// P = D_t^2 - a(z) D_x^2 + b0(z) D_t + b1(z) D_x + c(z), z = (t, x).
/// Polynomials use variable 0 for t and 1 for x.
struct SecondOrderExample {
  Polynomial a{2};
  ComplexCoef b0, b1, c;
  double t0 = 0, x0 = 0;  ///< basepoint z0

  static constexpr std::size_t kT = 0, kX = 1;

  /// a = coef * t^power, everything else zero.
  static SecondOrderExample power_law(double coef, int power, cplx b1 = 0.0);

  double a_at(double t, double x) const;
  /// (a_t, a_x) at z0.
  std::array<double, 2> da() const;
  double a_tt() const;
  bool operator==(const SecondOrderExample&) const = default;
};

/// N = 3 + 2 [3/2 + |b1(z0)| a_tt(z0)^{-1/2}]. Throws InvalidInput unless
/// a(z0) = da(z0) = 0, IllPosedCase if a_tt(z0) <= tol and b1(z0) != 0,
/// DegenerateCase if a_tt(z0) <= tol otherwise.
int oleinik_loss_count(const SecondOrderExample& ex, double tol = 1e-12);

struct SecondOrderOptions {
  double t_begin = 0, t_end = 1;
  std::array<cplx, 2> data{cplx{1, 0}, cplx{0, 0}};  ///< (u, u') at t_begin
  double rtol = 1e-10, atol = 1e-12;
  std::size_t samples = 1025;
  std::size_t max_steps = 2000000;
};

struct SecondOrderTrajectory {
  double xi = 0;
  std::vector<double> times;
  std::vector<cplx> u, du;
  StepStats stats;
  double endpoint() const { return std::abs(u.back()); }
  double sup() const;
};

/// Frozen at x0: u'' = -a(t, x0) xi^2 u - i b0 u' + b1 xi u + c u - g, g = 0.
SecondOrderTrajectory simulate_second_order(const SecondOrderExample& ex, double xi,
                                            const SecondOrderOptions& opt = {});

std::vector<SecondOrderTrajectory> simulate_second_order(
    const SecondOrderExample& ex, std::span<const double> xis,
    const SecondOrderOptions& opt = {}, std::size_t workers = 0);

enum class GrowthVerdict { PolynomialLoss, SuperPolynomial };
std::string to_string(GrowthVerdict v);

/// log m = k log|xi| + c0
struct PolynomialFit {
  double k = 0, c0 = 0, sse = 0;
};

/// log m = c |xi|^sigma + k log|xi| + c0
struct ExponentialFit {
  double c = 0, sigma = 0, k = 0, c0 = 0, sse = 0;
};

struct GrowthReport {
  std::vector<double> xi, magnitude;
  PolynomialFit poly;
  ExponentialFit expo;
  double sse_ratio = 0;          ///< poly.sse / expo.sse
  /// max over the top decade of log10(value / polynomial fit below it)
  double extrapolation_gap = 0;
  GrowthVerdict verdict = GrowthVerdict::PolynomialLoss;
  double k = 0;  ///< poly.k
};

struct GrowthFitOptions {
  std::size_t min_points = 8;
  double selection_ratio = 100;
  double sigma_lo = 0.05, sigma_hi = 2.0;
};

/// Fits both models to (|xi|, magnitude). SuperPolynomial needs the
/// polynomial residual to exceed the exponential one by selection_ratio,
/// c > 0, and a polynomial fit of the points below the top |xi| decade to
/// underpredict some value in that decade by selection_ratio. Throws
/// InsufficientData below min_points or on non-positive values.
GrowthReport growth_fit(std::span<const double> xi, std::span<const double> magnitude,
                        const GrowthFitOptions& opt = {});

/// Largest deviation of the polynomial exponent fitted on sliding windows of
/// `window` consecutive points from the full-range exponent.
double exponent_spread(const GrowthReport& r, std::size_t window);

struct ProbeOptions {
  int first_octave = 0, last_octave = 10;
  std::size_t directions = 4;
  double t0 = 0, T = 1;
  std::array<cplx, 3> data{cplx{1, 0}, cplx{0, 0}, cplx{0, 0}};
  cplx forcing{1, 0};
  double rtol = 1e-9, atol = 1e-12;
  std::size_t samples = 257;
};

/// Mode sweeps of the third-order model with constant forcing and fixed data
/// at |xi| = 2^k; magnitude per octave is max over directions of sup_s |u|.
/// Does not require a2 to be elliptic, so degenerate surrogates can be probed.
GrowthReport probe_model_operator(std::shared_ptr<const ModelOperator> op,
                                  const ProbeOptions& opt = {},
                                  std::size_t workers = 0,
                                  const GrowthFitOptions& fit = {});

/// Second-order analogue: magnitude per octave is max over +-xi of sup_t |u|.
GrowthReport probe_second_order(const SecondOrderExample& ex, int first_octave,
                                int last_octave, const SecondOrderOptions& opt = {},
                                std::size_t workers = 0,
                                const GrowthFitOptions& fit = {});

}  // namespace trichar
