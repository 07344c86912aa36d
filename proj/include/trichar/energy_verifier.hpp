#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trichar/grids.hpp"
#include "trichar/mode_solver.hpp"

namespace trichar {

enum class Direction { Forward, Backward };
std::string to_string(Direction d);

/// Norm orders (m2, m1, m0) applied to (u'', u', u) on the left-hand side.
struct NormOrders {
  double d2 = 1, d1 = 2, d0 = 2;
};
/// Forward: (1, 2, 2); Backward: (2/3, 4/3, 2).
NormOrders norm_orders(Direction d);
/// Order 2N/3 + 2 of the right-hand side norm.
double forcing_order(int N);

/// ||v||^2_(m) = sum_grid w(xi) (1 + |xi|^2)^m |u(xi)|^2.
struct SobolevNormSpec {
  std::vector<XiNode> nodes;

  static SobolevNormSpec from_grid(const XiGridSpec& spec);

  /// Throws InvalidInput if a weight is not positive or the grid is not
  /// closed under xi -> -xi.
  void validate() const;
  double norm_sq(double m, std::span<const double> abs2) const;
};

/// E~(u) = |u''|^2 + s a |u'|^2 at every sample.
std::vector<double> energy_tilde(const ModeTrajectory& tr, double a);

struct IdentityResidual {
  double lhs = 0;       ///< int e^{-lambda s} f^{-2N} 2 Re(g conj u'')
  double rhs = 0;       ///< boundary term + integrated right-hand side
  double absolute = 0;  ///< |lhs - rhs|
  double relative = 0;  ///< absolute / (sum of |term| magnitudes)
};

/// Integrated master identity over [t0, T] with the exact boundary term.
/// Requires a2 independent of t (throws InvalidInput otherwise).
IdentityResidual verify_master_identity(const ModeTrajectory& tr,
                                        const ModelOperator& op,
                                        double lambda, int N,
                                        std::span<const double> x = {});

/// Samples of g and g' on a uniform grid.
struct SampledFunction {
  std::vector<double> times;
  std::vector<cplx> values;
  std::vector<cplx> derivs;  ///< empty: taken from a cubic B-spline fit
};

struct WeightInequalityMargin {
  double margin = 0;  ///< integrated (rhs - lhs) incl. boundary term, <= 0
  double lhs = 0;
  double rhs = 0;
};

/// Forward (data end s = t0): e^{-lambda s} f^{-2k+1} |g'|^2 >=
///   d/ds(e^{-lambda s} f^{-2k} |g|^2) + lambda e^{-lambda s} f^{-2k} |g|^2
///   + (2k - 1) e^{-lambda s} f^{-2k-1} |g|^2.
/// Backward (data end s = T): e^{lambda s} f^{2k+1} |g'|^2 >=
///   -d/ds(e^{lambda s} f^{2k} |g|^2) + lambda e^{lambda s} f^{2k} |g|^2
///   + (2k - 1) e^{lambda s} f^{2k-1} |g|^2.
/// f = s + (1 + a)^{-1/3}. Throws InvalidInput unless g vanishes at the data end.
WeightInequalityMargin verify_scalar_weight_inequality(
    const SampledFunction& g, double a, int k, double lambda, Direction dir);

/// One battery member swept over the grid: trajectories[i] belongs to nodes[i].
struct MemberSweep {
  std::vector<ModeTrajectory> trajectories;
};

struct ModeContribution {
  std::vector<double> xi;
  double weight = 0;
  double lhs = 0;
  double rhs = 0;
};

struct EstimateReport {
  Direction direction = Direction::Forward;
  double lambda = 0;
  int N = 0;
  double t0 = 0, T = 0;
  double lhs = 0, rhs = 0, ratio = 0;
  double C = 0;
  std::optional<double> lambda0;
  bool pass = true;
  std::vector<ModeContribution> modes;
};

/// Estimate for one battery member. Time weights are normalized to 1 at
/// the data end (e^{-lambda (s - t0)} forward, e^{lambda (s - T)} backward).
/// Throws InconsistentSweep if modes disagree on interval, sampling or data
/// site, or the data site does not match the direction.
EstimateReport assemble_estimate(const MemberSweep& member,
                                 const SobolevNormSpec& norms, double lambda,
                                 int N, Direction dir, double C);

/// Per-mode integrals int w_lambda(s) X(s) ds for X in (|u''|^2, |u'|^2,
/// |u|^2, |g|^2); independent of N, so the fit reuses them.
struct ModeIntegrals {
  double d2 = 0, d1 = 0, d0 = 0, g = 0;
};

class EstimateEngine {
 public:
  EstimateEngine(std::vector<MemberSweep> members, SobolevNormSpec norms,
                 Direction dir);

  std::size_t members() const { return members_.size(); }
  Direction direction() const { return dir_; }
  const SobolevNormSpec& norms() const { return norms_; }

  std::vector<std::vector<ModeIntegrals>> integrals(double lambda) const;
  /// lhs/rhs per member (0 when both sides vanish).
  std::vector<double> ratios(const std::vector<std::vector<ModeIntegrals>>& I,
                             double lambda, int N) const;
  std::vector<double> ratios(double lambda, int N) const {
    return ratios(integrals(lambda), lambda, N);
  }
  EstimateReport report(std::size_t member, double lambda, int N, double C) const;

 private:
  std::vector<MemberSweep> members_;
  SobolevNormSpec norms_;
  Direction dir_;
  double t0_ = 0, T_ = 0;
};

struct FitRow {
  int N = 0;
  bool stabilized = false;
  double lambda0 = 0;
  double C = 0;  ///< sup over the battery of lhs/rhs at lambda0
  std::vector<double> sup_ratio;  ///< along the lambda grid
};

struct FitResult {
  std::vector<double> lambda_grid;
  std::vector<FitRow> rows;
  std::optional<int> N_required;  ///< smallest N with C(N) <= C_target
  const FitRow* row(int N) const;
};

struct FitOptions {
  std::optional<double> C_target;
  int bisection_steps = 30;
};

/// For each N: lambda0 is the smallest lambda (grid, refined by bisection
/// toward the previous node) from which every member's ratio is
/// nonincreasing along the rest of the grid; C(N) is the sup ratio there.
/// Throws NoStabilization if no N stabilizes or the grid is empty.
FitResult fit_constants(const EstimateEngine& engine, std::span<const int> N_range,
                        std::span<const double> lambda_grid,
                        const FitOptions& opt = {});

/// Smallest grid lambda from which every member's ratio stays <= C on the
/// rest of the grid; empty if the last node already fails.
std::optional<double> threshold_lambda(const EstimateEngine& engine, int N, double C,
                                       std::span<const double> lambda_grid);

/// Geometric grid lo * factor^k up to hi.
std::vector<double> geometric_grid(double lo, double hi, double factor);

/// Randomized forcing battery: member m uses
/// g(s, xi) = (1 + |xi|^2)^{-decay} sum_{j <= max_power} c_j s^j e^{i w_j s}
/// with c_j uniform in the unit square and w_j uniform in [-omega_max, omega_max].
struct BatterySpec {
  std::size_t members = 4;
  std::uint64_t seed = 7;
  int max_power = 2;
  double omega_max = 8.0;
  double decay = 1.0;
  bool operator==(const BatterySpec&) const = default;
};

struct Battery {
  BatterySpec spec;
  std::vector<std::vector<ForcingTerm>> members;
};

Battery make_battery(const BatterySpec& spec);

/// Mode problems of one member over the grid with vanishing data at the end
/// selected by `dir`.
std::vector<ModeProblem> battery_modes(const Battery& battery, std::size_t member,
                                       std::shared_ptr<const ModelOperator> op,
                                       const SobolevNormSpec& norms, double t0,
                                       double T, Direction dir);

/// Sweeps every member; throws the first mode failure as Error.
std::vector<MemberSweep> sweep_battery(const Battery& battery,
                                       std::shared_ptr<const ModelOperator> op,
                                       const SobolevNormSpec& norms, double t0,
                                       double T, Direction dir,
                                       const IntegrateOptions& opt = {},
                                       std::size_t workers = 0);

/// Auxiliary strictly hyperbolic bound on [t, T], t > 0:
/// K(t) = int e^{-lambda s} ||v||^2_(2N/3+3) / int e^{-lambda s} ||Pv||^2_(2N/3+1),
/// expected to grow no faster than 1/t^2.
struct GronwallRow {
  double t = 0;
  double K = 0;
  double t2K = 0;
};
std::vector<GronwallRow> gronwall_check(const Battery& battery,
                                        std::shared_ptr<const ModelOperator> op,
                                        const SobolevNormSpec& norms,
                                        std::span<const double> t_values, double T,
                                        int N, double lambda,
                                        const IntegrateOptions& opt = {},
                                        std::size_t workers = 0);

}  // namespace trichar
