#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trichar/dopri.hpp"
#include "trichar/symbol_core.hpp"

namespace trichar {

using cplx = std::complex<double>;

/// One term c s^k e^{omega s} of a closed-form forcing.
struct ForcingTerm {
  cplx coef{0, 0};
  int power = 0;
  cplx omega{0, 0};
  bool operator==(const ForcingTerm&) const = default;
};

/// Right-hand side g(s): a finite sum of ForcingTerms, uniformly spaced
/// samples with cubic B-spline interpolation, or an arbitrary callable.
class Forcing {
 public:
  enum class Kind { Expression, Sampled, Callable };

  Forcing() = default;  ///< g = 0
  static Forcing expression(std::vector<ForcingTerm> terms);
  static Forcing sampled(double s0, double h, std::vector<cplx> values);
  static Forcing callable(std::function<cplx(double)> fn);

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::Expression && terms_.empty(); }
  const std::vector<ForcingTerm>& terms() const { return terms_; }

  cplx operator()(double s) const;

  /// a * f + b * g; stays an expression when both inputs are.
  static Forcing combine(cplx a, const Forcing& f, cplx b, const Forcing& g);

 private:
  struct SplineData;
  Kind kind_ = Kind::Expression;
  std::vector<ForcingTerm> terms_;
  std::shared_ptr<const SplineData> spline_;
  std::function<cplx(double)> fn_;
};

enum class DataSite { LowerEnd, UpperEnd };
std::string to_string(DataSite d);

struct ModeProblem {
  std::shared_ptr<const ModelOperator> op;
  std::vector<double> xi;
  std::vector<double> x;  ///< frozen spatial point; empty means 0
  Forcing forcing;
  double t0 = 0, T = 1;
  DataSite data_site = DataSite::LowerEnd;
  std::array<cplx, 3> data{};  ///< (u, u', u'') at the data site
};

/// u''' = g - c2 u'' - c1 u' - c0 u with c2 = i s a1, c1 = s a2 - B1 - C_tau,
/// c0 = -i s^2 a3 + b1, b1 = -i (b + B2 + C_0). Coefficients are polynomials
/// in s at frozen (x, xi).
class ModeCoefficients {
 public:
  ModeCoefficients() = default;
  ModeCoefficients(const ModelOperator& op, std::span<const double> x,
                   std::span<const double> xi);

  double a1(double s) const { return horner(a1_, s); }
  double a2(double s) const { return horner(a2_, s); }
  double a3(double s) const { return horner(a3_, s); }
  double b(double s) const { return horner(b_, s); }       ///< b + B2 + C_0
  double extra1(double s) const { return horner(e1_, s); }  ///< -B1 - C_tau
  bool a2_time_independent() const { return a2_.size() <= 1; }

  cplx c2(double s) const { return {0.0, s * a1(s)}; }
  double c1(double s) const { return s * a2(s) + extra1(s); }
  cplx b1(double s) const { return {0.0, -b(s)}; }
  cplx c0(double s) const { return cplx{0.0, -s * s * a3(s)} + b1(s); }

 private:
  std::vector<double> a1_, a2_, a3_, b_, e1_;
};

/// assemble_rhs: coefficient functions of the mode ODE.
ModeCoefficients assemble_rhs(const ModelOperator& op, std::span<const double> xi,
                              std::span<const double> x = {});

struct IntegrateOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  std::size_t samples = 2049;   ///< uniform dense-output grid over [t0, T]
  std::size_t max_steps = 2000000;
  std::size_t fixed_steps = 0;  ///< > 0: fixed step size (order studies)
  bool keep_dense = true;       ///< false drops the interpolant after sampling
};

struct ModeTrajectory {
  std::vector<double> xi;
  double t0 = 0, T = 1;
  DataSite data_site = DataSite::LowerEnd;
  std::vector<double> times;
  std::vector<cplx> u, du, d2u, d3u, g;
  std::vector<double> residual;  ///< dense-output consistency, see residual_threshold
  StepStats stats;
  double rtol = 0, atol = 0;
  DenseOutput<6> dense;  ///< empty when sampled with keep_dense = false

  /// Throws InvalidInput when the interpolant was not kept.
  std::array<cplx, 3> state_at(double s) const;
  double max_residual() const;
  bool residual_ok() const;
};

/// Pass threshold of the per-sample residual: | d/ds (interpolated u'') -
/// u'''(ODE) | / (|g| + |c2 u''| + |c1 u'| + |c0 u| + |u'''|).
double residual_threshold(double rtol);

/// Throws InvalidInput (bad interval/tolerance), StepFailure,
/// ToleranceUnachievable.
ModeTrajectory integrate_mode(const ModeProblem& prob,
                              const IntegrateOptions& opt = {});

struct SweepEntry {
  std::optional<ModeTrajectory> trajectory;
  std::string error_kind;  ///< empty on success
  std::string error;
  double error_location = 0;
  bool ok() const { return trajectory.has_value(); }
};

/// Parallel map of integrate_mode; output order matches input order and does
/// not depend on `workers`. Per-mode errors are recorded, not thrown.
std::vector<SweepEntry> sweep(const std::vector<ModeProblem>& modes,
                              const IntegrateOptions& opt = {},
                              std::size_t workers = 0);

}  // namespace trichar
