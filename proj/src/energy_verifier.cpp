#include "trichar/energy_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "trichar/errors.hpp"
#include "trichar/quadrature.hpp"

namespace trichar {

std::string to_string(Direction d) {
  return d == Direction::Forward ? "Forward" : "Backward";
}

NormOrders norm_orders(Direction d) {
  if (d == Direction::Forward) return {1.0, 2.0, 2.0};
  return {2.0 / 3.0, 4.0 / 3.0, 2.0};
}

double forcing_order(int N) { return 2.0 * N / 3.0 + 2.0; }

SobolevNormSpec SobolevNormSpec::from_grid(const XiGridSpec& spec) {
  SobolevNormSpec s;
  s.nodes = build_xi_grid(spec);
  return s;
}

void SobolevNormSpec::validate() const {
  if (nodes.empty()) throw InvalidInput("norm grid is empty");
  for (const auto& a : nodes) {
    if (!(a.weight > 0)) throw InvalidInput("norm grid weights must be positive");
    bool found = false;
    for (const auto& b : nodes) {
      if (b.xi.size() != a.xi.size()) continue;
      double d = 0;
      for (std::size_t j = 0; j < a.xi.size(); ++j) d = std::max(d, std::abs(a.xi[j] + b.xi[j]));
      if (d <= 1e-12 * std::max(1.0, a.magnitude) && b.weight == a.weight) {
        found = true;
        break;
      }
    }
    if (!found) throw InvalidInput("norm grid is not symmetric under xi -> -xi");
  }
}

namespace {

double japanese_sq(std::span<const double> xi) {
  double r2 = 0;
  for (double v : xi) r2 += v * v;
  return 1.0 + r2;
}

double spacing(const std::vector<double>& times) {
  if (times.size() < 3) throw InvalidInput("need at least 3 samples");
  const double h = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - times[i - 1] - h) > 1e-9 * h) {
      throw InvalidInput("samples must be uniformly spaced");
    }
  }
  return h;
}

// Time weight normalized to 1 at the data end.
std::vector<double> time_weight(const std::vector<double>& times, double lambda,
                                Direction dir, double t0, double T) {
  std::vector<double> w(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    w[i] = dir == Direction::Forward ? std::exp(-lambda * (times[i] - t0))
                                     : std::exp(lambda * (times[i] - T));
  }
  return w;
}

}  // namespace

double SobolevNormSpec::norm_sq(double m, std::span<const double> abs2) const {
  if (abs2.size() != nodes.size()) throw InvalidInput("norm: value count does not match grid");
  CompensatedSum acc;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    acc.add(nodes[i].weight * std::pow(japanese_sq(nodes[i].xi), m) * abs2[i]);
  }
  return acc.value();
}

std::vector<double> energy_tilde(const ModeTrajectory& tr, double a) {
  std::vector<double> e(tr.times.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = std::norm(tr.d2u[i]) + tr.times[i] * a * std::norm(tr.du[i]);
  }
  return e;
}

IdentityResidual verify_master_identity(const ModeTrajectory& tr,
                                        const ModelOperator& op, double lambda,
                                        int N, std::span<const double> x) {
  const ModeCoefficients co(op, x, tr.xi);
  if (!co.a2_time_independent()) {
    throw InvalidInput("master identity needs a2 independent of t");
  }
  const double a = co.a2(0.0);
  const double h = spacing(tr.times);
  const std::size_t m = tr.times.size();
  const double f0 = std::pow(1.0 + a, -1.0 / 3.0);
  const auto Et = energy_tilde(tr, a);

  std::vector<double> lhs(m), rhs(m), mag(m);
  double bnd[2] = {0, 0};
  for (std::size_t i = 0; i < m; ++i) {
    const double s = tr.times[i];
    const double f = s + f0;
    const double wF = std::exp(-lambda * (s - tr.t0)) * std::pow(f, -2.0 * N);
    const cplx u = tr.u[i], v = tr.du[i], w = tr.d2u[i];
    lhs[i] = wF * 2.0 * std::real(tr.g[i] * std::conj(w));
    const double terms[] = {
        lambda * wF * Et[i],
        2.0 * N * wF / f * Et[i],
        -wF * a * std::norm(v),
        wF * co.extra1(s) * 2.0 * std::real(w * std::conj(v)),
        wF * 2.0 * s * s * co.a3(s) * std::imag(u * std::conj(w)),
        wF * 2.0 * std::real(co.b1(s) * u * std::conj(w)),
    };
    CompensatedSum r, mg;
    for (double t : terms) {
      r.add(t);
      mg.add(std::abs(t));
    }
    rhs[i] = r.value();
    mag[i] = mg.value() + std::abs(lhs[i]);
    if (i == 0) bnd[0] = wF * Et[i];
    if (i + 1 == m) bnd[1] = wF * Et[i];
  }
  IdentityResidual res;
  res.lhs = simpson(lhs, h);
  res.rhs = (bnd[1] - bnd[0]) + simpson(rhs, h);
  res.absolute = std::abs(res.lhs - res.rhs);
  const double scale = simpson(mag, h) + std::abs(bnd[0]) + std::abs(bnd[1]);
  res.relative = scale > 0 ? res.absolute / scale : 0.0;
  return res;
}

WeightInequalityMargin verify_scalar_weight_inequality(const SampledFunction& g,
                                                       double a, int k,
                                                       double lambda,
                                                       Direction dir) {
  const double h = spacing(g.times);
  const std::size_t m = g.times.size();
  if (g.values.size() != m) throw InvalidInput("g: value count does not match times");
  std::vector<cplx> dg = g.derivs;
  if (dg.empty()) {
    std::vector<double> re(m), im(m);
    for (std::size_t i = 0; i < m; ++i) {
      re[i] = g.values[i].real();
      im[i] = g.values[i].imag();
    }
    using boost::math::interpolators::cardinal_cubic_b_spline;
    cardinal_cubic_b_spline<double> sr(re.begin(), re.end(), g.times.front(), h);
    cardinal_cubic_b_spline<double> si(im.begin(), im.end(), g.times.front(), h);
    dg.resize(m);
    for (std::size_t i = 0; i < m; ++i) dg[i] = {sr.prime(g.times[i]), si.prime(g.times[i])};
  }
  if (dg.size() != m) throw InvalidInput("g: derivative count does not match times");
  double gmax = 0;
  for (const auto& v : g.values) gmax = std::max(gmax, std::abs(v));
  const cplx end = dir == Direction::Forward ? g.values.front() : g.values.back();
  if (std::abs(end) > 1e-12 * gmax) {
    throw InvalidInput("g must vanish at the data end");
  }

  const double t0 = g.times.front(), T = g.times.back();
  const double f0 = std::pow(1.0 + a, -1.0 / 3.0);
  const double sgn = dir == Direction::Forward ? -1.0 : 1.0;
  const auto w = time_weight(g.times, lambda, dir, t0, T);
  std::vector<double> L(m), R(m);
  double bnd[2] = {0, 0};
  for (std::size_t i = 0; i < m; ++i) {
    const double f = g.times[i] + f0;
    // f^{sgn 2k} with sgn = -1 forward, +1 backward.
    const double fk = std::pow(f, sgn * 2.0 * k);
    const double g2 = std::norm(g.values[i]);
    L[i] = w[i] * fk * f * std::norm(dg[i]);
    R[i] = lambda * w[i] * fk * g2 + (2.0 * k - 1) * w[i] * fk / f * g2;
    if (i == 0) bnd[0] = w[i] * fk * g2;
    if (i + 1 == m) bnd[1] = w[i] * fk * g2;
  }
  WeightInequalityMargin out;
  out.lhs = simpson(L, h);
  // Forward carries +d/ds, backward -d/ds.
  out.rhs = -sgn * (bnd[1] - bnd[0]) + simpson(R, h);
  out.margin = out.rhs - out.lhs;
  return out;
}

namespace {

void check_member(const MemberSweep& member, const SobolevNormSpec& norms,
                  Direction dir, double& t0, double& T, std::size_t& samples,
                  bool first) {
  if (member.trajectories.size() != norms.nodes.size()) {
    throw InconsistentSweep("sweep has " + std::to_string(member.trajectories.size()) +
                            " modes, grid has " + std::to_string(norms.nodes.size()));
  }
  const DataSite want = dir == Direction::Forward ? DataSite::LowerEnd : DataSite::UpperEnd;
  for (std::size_t i = 0; i < member.trajectories.size(); ++i) {
    const auto& tr = member.trajectories[i];
    if (first && i == 0) {
      t0 = tr.t0;
      T = tr.T;
      samples = tr.times.size();
    }
    if (tr.t0 != t0 || tr.T != T || tr.times.size() != samples) {
      throw InconsistentSweep("modes disagree on interval or sampling");
    }
    if (tr.data_site != want) {
      throw InconsistentSweep("data site " + to_string(tr.data_site) +
                              " does not match direction " + to_string(dir));
    }
    const auto& node = norms.nodes[i].xi;
    if (tr.xi.size() != node.size()) throw InconsistentSweep("mode xi dimension mismatch");
    for (std::size_t j = 0; j < node.size(); ++j) {
      if (std::abs(tr.xi[j] - node[j]) > 1e-12 * std::max(1.0, std::abs(node[j]))) {
        throw InconsistentSweep("mode " + std::to_string(i) + " is not at its grid node");
      }
    }
  }
}

struct Series {
  std::vector<double> d2, d1, d0, g;
};

Series series_of(const ModeTrajectory& tr) {
  Series s;
  const std::size_t m = tr.times.size();
  s.d2.resize(m);
  s.d1.resize(m);
  s.d0.resize(m);
  s.g.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    s.d2[i] = std::norm(tr.d2u[i]);
    s.d1[i] = std::norm(tr.du[i]);
    s.d0[i] = std::norm(tr.u[i]);
    s.g[i] = std::norm(tr.g[i]);
  }
  return s;
}

double weighted_integral(const std::vector<double>& w, const std::vector<double>& x,
                         double h, std::vector<double>& scratch) {
  scratch.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) scratch[i] = w[i] * x[i];
  return simpson(scratch, h);
}

ModeIntegrals integrate_series(const Series& s, const std::vector<double>& w,
                               double h, std::vector<double>& scratch) {
  return {weighted_integral(w, s.d2, h, scratch), weighted_integral(w, s.d1, h, scratch),
          weighted_integral(w, s.d0, h, scratch), weighted_integral(w, s.g, h, scratch)};
}

struct Sides {
  double lhs = 0, rhs = 0;
};

Sides combine(const ModeIntegrals& I, double r2, double weight, double lambda,
              int N, const NormOrders& o) {
  const double lhs = lambda * weight *
                     (std::pow(r2, o.d2) * I.d2 + std::pow(r2, o.d1) * I.d1 +
                      std::pow(r2, o.d0) * I.d0);
  const double rhs = weight * std::pow(r2, forcing_order(N)) * I.g;
  return {lhs, rhs};
}

double ratio_of(double lhs, double rhs) {
  if (rhs > 0) return lhs / rhs;
  return lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

EstimateReport assemble_estimate(const MemberSweep& member,
                                 const SobolevNormSpec& norms, double lambda,
                                 int N, Direction dir, double C) {
  double t0 = 0, T = 0;
  std::size_t samples = 0;
  check_member(member, norms, dir, t0, T, samples, true);
  EstimateReport rep;
  rep.direction = dir;
  rep.lambda = lambda;
  rep.N = N;
  rep.t0 = t0;
  rep.T = T;
  rep.C = C;
  if (member.trajectories.empty()) return rep;
  const auto& times = member.trajectories.front().times;
  const double h = spacing(times);
  const auto w = time_weight(times, lambda, dir, t0, T);
  const auto o = norm_orders(dir);
  std::vector<double> scratch;
  CompensatedSum L, R;
  for (std::size_t i = 0; i < member.trajectories.size(); ++i) {
    const auto& tr = member.trajectories[i];
    const auto I = integrate_series(series_of(tr), w, h, scratch);
    const auto sd = combine(I, japanese_sq(norms.nodes[i].xi), norms.nodes[i].weight,
                            lambda, N, o);
    L.add(sd.lhs);
    R.add(sd.rhs);
    rep.modes.push_back({tr.xi, norms.nodes[i].weight, sd.lhs, sd.rhs});
  }
  rep.lhs = L.value();
  rep.rhs = R.value();
  rep.ratio = ratio_of(rep.lhs, rep.rhs);
  rep.pass = rep.lhs <= C * rep.rhs;
  return rep;
}

namespace {

struct EngineSeries {
  std::vector<double> times;
  std::vector<std::vector<Series>> data;  // [member][mode]
};

}  // namespace

EstimateEngine::EstimateEngine(std::vector<MemberSweep> members,
                               SobolevNormSpec norms, Direction dir)
    : members_(std::move(members)), norms_(std::move(norms)), dir_(dir) {
  std::size_t samples = 0;
  for (std::size_t m = 0; m < members_.size(); ++m) {
    check_member(members_[m], norms_, dir_, t0_, T_, samples, m == 0);
  }
}

std::vector<std::vector<ModeIntegrals>> EstimateEngine::integrals(double lambda) const {
  std::vector<std::vector<ModeIntegrals>> out(members_.size());
  if (members_.empty() || members_.front().trajectories.empty()) return out;
  const auto& times = members_.front().trajectories.front().times;
  const double h = spacing(times);
  const auto w = time_weight(times, lambda, dir_, t0_, T_);
  std::vector<double> scratch;
  for (std::size_t m = 0; m < members_.size(); ++m) {
    for (const auto& tr : members_[m].trajectories) {
      out[m].push_back(integrate_series(series_of(tr), w, h, scratch));
    }
  }
  return out;
}

std::vector<double> EstimateEngine::ratios(
    const std::vector<std::vector<ModeIntegrals>>& I, double lambda, int N) const {
  const auto o = norm_orders(dir_);
  std::vector<double> r(I.size());
  for (std::size_t m = 0; m < I.size(); ++m) {
    CompensatedSum L, R;
    for (std::size_t i = 0; i < I[m].size(); ++i) {
      const auto sd = combine(I[m][i], japanese_sq(norms_.nodes[i].xi),
                              norms_.nodes[i].weight, lambda, N, o);
      L.add(sd.lhs);
      R.add(sd.rhs);
    }
    r[m] = ratio_of(L.value(), R.value());
  }
  return r;
}

EstimateReport EstimateEngine::report(std::size_t member, double lambda, int N,
                                      double C) const {
  return assemble_estimate(members_.at(member), norms_, lambda, N, dir_, C);
}

const FitRow* FitResult::row(int N) const {
  for (const auto& r : rows) {
    if (r.N == N) return &r;
  }
  return nullptr;
}

std::vector<double> geometric_grid(double lo, double hi, double factor) {
  if (!(lo > 0) || !(factor > 1)) throw InvalidInput("geometric grid needs lo > 0, factor > 1");
  std::vector<double> g;
  for (double v = lo; v <= hi * (1 + 1e-12); v *= factor) g.push_back(v);
  return g;
}

FitResult fit_constants(const EstimateEngine& engine, std::span<const int> N_range,
                        std::span<const double> lambda_grid, const FitOptions& opt) {
  if (lambda_grid.empty() || N_range.empty()) {
    throw NoStabilization("empty lambda range or N range");
  }
  FitResult res;
  res.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
  std::sort(res.lambda_grid.begin(), res.lambda_grid.end());
  const auto& grid = res.lambda_grid;
  const std::size_t G = grid.size();

  std::vector<std::vector<std::vector<ModeIntegrals>>> I;
  I.reserve(G);
  for (double l : grid) I.push_back(engine.integrals(l));

  for (int N : N_range) {
    FitRow row;
    row.N = N;
    std::vector<std::vector<double>> R(G);
    for (std::size_t i = 0; i < G; ++i) {
      R[i] = engine.ratios(I[i], grid[i], N);
      row.sup_ratio.push_back(*std::max_element(R[i].begin(), R[i].end()));
    }
    std::size_t i0 = G - 1;
    while (i0 > 0) {
      bool nonincreasing = true;
      for (std::size_t m = 0; m < R[i0].size(); ++m) {
        nonincreasing = nonincreasing && R[i0 - 1][m] >= R[i0][m];
      }
      if (!nonincreasing) break;
      --i0;
    }
    if (i0 + 1 < G) {
      row.stabilized = true;
      double lam0 = grid[i0];
      if (i0 > 0) {
        // Bisection on the sign of the steepest member slope between the
        // last increasing node and grid[i0].
        auto rising = [&](double l) {
          const double dl = l * 1e-6;
          const auto a = engine.ratios(l, N), b = engine.ratios(l + dl, N);
          for (std::size_t m = 0; m < a.size(); ++m) {
            if (b[m] > a[m]) return true;
          }
          return false;
        };
        double lo = grid[i0 - 1], hi = grid[i0];
        if (rising(lo) && !rising(hi)) {
          for (int it = 0; it < opt.bisection_steps; ++it) {
            const double mid = std::sqrt(lo * hi);
            (rising(mid) ? lo : hi) = mid;
          }
          lam0 = hi;
        }
      }
      row.lambda0 = lam0;
      const auto r0 = engine.ratios(lam0, N);
      row.C = *std::max_element(r0.begin(), r0.end());
      for (std::size_t i = i0; i < G; ++i) row.C = std::max(row.C, row.sup_ratio[i]);
    }
    res.rows.push_back(std::move(row));
  }
  bool any = false;
  for (const auto& r : res.rows) any = any || r.stabilized;
  if (!any) {
    throw NoStabilization("ratio lhs/rhs is not eventually nonincreasing in lambda for any N");
  }
  if (opt.C_target) {
    std::vector<const FitRow*> sorted;
    for (const auto& r : res.rows) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a->N < b->N; });
    for (const auto* r : sorted) {
      if (r->stabilized && r->C <= *opt.C_target) {
        res.N_required = r->N;
        break;
      }
    }
  }
  return res;
}

std::optional<double> threshold_lambda(const EstimateEngine& engine, int N, double C,
                                       std::span<const double> lambda_grid) {
  std::vector<double> grid(lambda_grid.begin(), lambda_grid.end());
  std::sort(grid.begin(), grid.end());
  std::optional<double> out;
  for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
    const auto r = engine.ratios(*it, N);
    if (*std::max_element(r.begin(), r.end()) > C) break;
    out = *it;
  }
  return out;
}

Battery make_battery(const BatterySpec& spec) {
  if (spec.members == 0) throw InvalidInput("battery needs at least one member");
  if (spec.max_power < 0) throw InvalidInput("battery max_power must be >= 0");
  Battery b;
  b.spec = spec;
  Rng rng(spec.seed);
  for (std::size_t m = 0; m < spec.members; ++m) {
    std::vector<ForcingTerm> terms;
    for (int j = 0; j <= spec.max_power; ++j) {
      ForcingTerm t;
      const double re = rng.uniform(-1, 1);
      const double im = rng.uniform(-1, 1);
      t.coef = {re, im};
      t.power = j;
      t.omega = {0.0, rng.uniform(-spec.omega_max, spec.omega_max)};
      terms.push_back(t);
    }
    b.members.push_back(std::move(terms));
  }
  return b;
}

std::vector<ModeProblem> battery_modes(const Battery& battery, std::size_t member,
                                       std::shared_ptr<const ModelOperator> op,
                                       const SobolevNormSpec& norms, double t0,
                                       double T, Direction dir) {
  std::vector<ModeProblem> out;
  for (const auto& node : norms.nodes) {
    ModeProblem p;
    p.op = op;
    p.xi = node.xi;
    p.t0 = t0;
    p.T = T;
    p.data_site = dir == Direction::Forward ? DataSite::LowerEnd : DataSite::UpperEnd;
    const double amp = std::pow(japanese_sq(node.xi), -battery.spec.decay);
    auto terms = battery.members.at(member);
    for (auto& t : terms) t.coef *= amp;
    p.forcing = Forcing::expression(std::move(terms));
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<MemberSweep> sweep_battery(const Battery& battery,
                                       std::shared_ptr<const ModelOperator> op,
                                       const SobolevNormSpec& norms, double t0,
                                       double T, Direction dir,
                                       const IntegrateOptions& opt,
                                       std::size_t workers) {
  std::vector<ModeProblem> all;
  for (std::size_t m = 0; m < battery.members.size(); ++m) {
    auto modes = battery_modes(battery, m, op, norms, t0, T, dir);
    all.insert(all.end(), modes.begin(), modes.end());
  }
  auto o = opt;
  o.keep_dense = false;
  auto res = sweep(all, o, workers);
  std::vector<MemberSweep> out(battery.members.size());
  const std::size_t M = norms.nodes.size();
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (!res[i].ok()) {
      throw Error("battery sweep: mode " + std::to_string(i % M) + " of member " +
                  std::to_string(i / M) + " failed: " + res[i].error);
    }
    out[i / M].trajectories.push_back(std::move(*res[i].trajectory));
  }
  return out;
}

std::vector<GronwallRow> gronwall_check(const Battery& battery,
                                        std::shared_ptr<const ModelOperator> op,
                                        const SobolevNormSpec& norms,
                                        std::span<const double> t_values, double T,
                                        int N, double lambda,
                                        const IntegrateOptions& opt,
                                        std::size_t workers) {
  std::vector<GronwallRow> rows;
  for (double t : t_values) {
    if (!(t > 0)) throw InvalidInput("gronwall_check needs t > 0");
    const auto members = sweep_battery(battery, op, norms, t, T, Direction::Forward, opt, workers);
    double K = 0;
    for (const auto& mem : members) {
      const auto& times = mem.trajectories.front().times;
      const double h = spacing(times);
      const auto w = time_weight(times, lambda, Direction::Forward, t, T);
      std::vector<double> scratch;
      CompensatedSum num, den;
      for (std::size_t i = 0; i < mem.trajectories.size(); ++i) {
        const auto I = integrate_series(series_of(mem.trajectories[i]), w, h, scratch);
        const double r2 = japanese_sq(norms.nodes[i].xi);
        const double wt = norms.nodes[i].weight;
        num.add(wt * std::pow(r2, 2.0 * N / 3.0 + 3.0) * I.d0);
        den.add(wt * std::pow(r2, 2.0 * N / 3.0 + 1.0) * I.g);
      }
      K = std::max(K, ratio_of(num.value(), den.value()));
    }
    rows.push_back({t, K, t * t * K});
  }
  return rows;
}

}  // namespace trichar
