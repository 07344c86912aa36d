#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "trichar/energy_verifier.hpp"
#include "trichar/errors.hpp"
#include "trichar/geometry.hpp"
#include "trichar/grids.hpp"
#include "trichar/mode_solver.hpp"
#include "trichar/scaling_calculus.hpp"
#include "trichar/scenario.hpp"
#include "trichar/wellposedness_probe.hpp"

#ifndef TRICHAR_VERSION
#define TRICHAR_VERSION "0.0.0"
#endif

namespace trichar::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
  Scenario scenario;
  std::string hash;
  fs::path out;
  std::size_t workers = 0;
};

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : f_(path) {
    if (!f_) throw InvalidInput("cannot write " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) f_ << (i ? "," : "") << cells[i];
    f_ << '\n';
  }

 private:
  std::ofstream f_;
};

std::vector<std::string> xi_columns(std::size_t n) {
  std::vector<std::string> c;
  for (std::size_t j = 1; j <= n; ++j) c.push_back("xi_" + std::to_string(j));
  return c;
}

void append(std::vector<std::string>& row, std::span<const double> v) {
  for (double x : v) row.push_back(num(x));
}

json header(const Context& c, const std::string& sub) {
  return {{"tool", "trichar"},
          {"version", TRICHAR_VERSION},
          {"scenario", c.scenario.name},
          {"scenario_hash", c.hash},
          {"seed", c.scenario.seed},
          {"subcommand", sub}};
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream f(p);
  if (!f) throw InvalidInput("cannot write " + p.string());
  f << j.dump(2) << '\n';
}

const ModelOperator& need_operator(const Scenario& s) {
  if (!s.op) throw SchemaError("/operator", "this subcommand needs an operator");
  return *s.op;
}

const SecondOrderSpec& need_second_order(const Scenario& s) {
  if (!s.second_order) throw SchemaError("/second_order", "this subcommand needs a second_order example");
  return *s.second_order;
}

Direction parse_direction(const std::string& d) {
  if (d == "forward") return Direction::Forward;
  if (d == "backward") return Direction::Backward;
  throw InvalidInput("--direction must be forward or backward");
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

int finish(const Context& c, const std::string& name, json report, bool pass) {
  report["pass"] = pass;
  write_json(c.out / (name + ".json"), report);
  std::cout << name << ": " << (pass ? "pass" : "FAIL") << " (" << (c.out / (name + ".json")).string()
            << ")\n";
  return pass ? kPass : kVerificationFailure;
}

int cmd_roots(const Context& c) {
  const auto& s = c.scenario;
  const auto& op = need_operator(s);
  const std::size_t n = op.layout.n;
  const auto nodes = build_xi_grid(s.grid);
  const auto dirs = unit_directions(n, s.grid.directions, s.seed);

  auto cols = std::vector<std::string>{"t"};
  for (auto& x : xi_columns(n)) cols.push_back(x);
  for (const char* k : {"lambda_1", "lambda_2", "lambda_3", "discriminant", "branch"}) cols.push_back(k);
  Csv csv(c.out / "roots.csv", cols);

  double worst_vieta = 0;
  std::size_t complex_points = 0, fallback = 0, samples = 0;
  for (std::size_t k = 0; k < s.t_nodes; ++k) {
    const double t = s.t0 + (s.T - s.t0) * static_cast<double>(k) / static_cast<double>(s.t_nodes - 1);
    for (const auto& node : nodes) {
      ++samples;
      std::vector<std::string> row{num(t)};
      append(row, node.xi);
      try {
        const auto a = solve_cubic_trig(op, t, s.x, node.xi);
        const auto& l = a.lambda;
        const double S = std::max({std::abs(l[0]), std::abs(l[1]), std::abs(l[2])});
        if (S > 0) {
          const auto& q = a.coefs;
          worst_vieta = std::max({worst_vieta, std::abs(l[0] + l[1] + l[2] + q.A()) / S,
                                  std::abs(l[0] * l[1] + l[0] * l[2] + l[1] * l[2] - q.B()) / (S * S),
                                  std::abs(l[0] * l[1] * l[2] + q.C()) / (S * S * S)});
        }
        append(row, l);
        row.push_back(num(a.discriminant));
        const bool fb = a.degenerate_flag == RootBranch::cardano_fallback;
        fallback += fb;
        row.push_back(fb ? "cardano_fallback" : "trig");
      } catch (const DiscriminantPositive& e) {
        ++complex_points;
        for (int j = 0; j < 3; ++j) row.push_back("nan");
        row.push_back(num(e.discriminant()));
        row.push_back("complex");
      }
      csv.row(row);
    }
  }

  auto r = header(c, "roots");
  r["samples"] = samples;
  r["complex_points"] = complex_points;
  r["fallback_points"] = fallback;
  r["max_vieta_residual"] = worst_vieta;
  r["hyperbolicity_limit"] = hyperbolicity_limit(op, s.x, s.T, s.t_nodes, dirs);
  double margin = INFINITY;
  for (std::size_t k = 0; k < s.t_nodes; ++k) {
    const double t = s.t0 + (s.T - s.t0) * static_cast<double>(k) / static_cast<double>(s.t_nodes - 1);
    margin = std::min(margin, ellipticity_margin(op, t, s.x, dirs));
  }
  r["ellipticity_margin"] = margin;
  r["delta0"] = op.delta0;
  try {
    Lemma2Grid g;
    g.t_nodes = s.t_nodes;
    g.directions = dirs;
    const auto l2 = lemma2_scan(op, s.x, s.T, g);
    r["separation"] = {{"gamma", l2.gamma}, {"gamma1", l2.gamma1}};
  } catch (const ScanFailed& e) {
    r["separation"] = {{"error", e.what()}};
  }
  return finish(c, "roots", std::move(r), worst_vieta < 1e-9);
}

int cmd_geometry(const Context& c) {
  const auto& s = c.scenario;
  const auto& op = need_operator(s);
  const auto& l = op.layout;
  const auto p = op.principal_symbol();
  const auto sym = FullSymbol::from_model(op);
  bool pass = true;
  json reports = json::array();
  for (const auto& d : unit_directions(l.n, s.grid.directions, s.seed)) {
    PhasePoint z;
    z.x.push_back(0.0);
    z.x.insert(z.x.end(), s.x.begin(), s.x.end());
    z.xi.push_back(0.0);
    z.xi.insert(z.xi.end(), d.begin(), d.end());
    const auto F = fundamental_matrix(p, l, z);
    const auto rep = classify_spectrum(F);
    const auto cond = check_necessary_conditions(sym, z);
    const bool criterion = op.a2.evaluate(0.0, s.x, d) > 0;
    const bool agree = criterion == (rep.verdict == Verdict::EffectivelyHyperbolic);
    pass = pass && agree && rep.symmetry_residual < 1e-9;
    json ev = json::array();
    for (auto mu : rep.eigenvalues) ev.push_back(cplx_json(mu));
    reports.push_back(
        {{"xi", d},
         {"eigenvalues", ev},
         {"real_pair", rep.real_pair ? json(*rep.real_pair) : json(nullptr)},
         {"verdict", to_string(rep.verdict)},
         {"norm", rep.norm},
         {"symmetry_residual", rep.symmetry_residual},
         {"hamiltonian_residual", rep.hamiltonian_residual},
         {"eigvec_condition", rep.eigvec_condition},
         {"ill_conditioned", rep.ill_conditioned},
         {"purely_imaginary", rep.purely_imaginary},
         {"a2_positive", criterion},
         {"conditions",
          {{"status", to_string(cond.status)},
           {"subprincipal", cplx_json(cond.subprincipal.value)},
           {"time_trace", cond.subprincipal.time_trace},
           {"spatial_trace", cond.subprincipal.spatial_trace},
           {"im_pass", cond.im_pass},
           {"levi_pass", cond.levi_pass},
           {"quarter_sum", cond.quarter_sum},
           {"levi_margin", cond.levi_margin}}}});
  }
  auto r = header(c, "geometry");
  r["reports"] = std::move(reports);
  return finish(c, "geometry", std::move(r), pass);
}

struct SimulateFlags {
  std::optional<std::size_t> modes;
  std::optional<double> tol, t0, T;
  std::string direction = "forward";
  std::size_t member = 0;
};

int cmd_simulate(const Context& c, const SimulateFlags& f) {
  const auto& s = c.scenario;
  auto op = std::make_shared<const ModelOperator>(need_operator(s));
  const double t0 = f.t0.value_or(s.t0), T = f.T.value_or(s.T);
  if (!(t0 >= 0 && t0 < T && T <= 1)) throw InvalidInput("need 0 <= --t0 < --T <= 1");
  const auto dir = parse_direction(f.direction);
  const auto battery = s.make_battery();
  if (f.member >= battery.members.size()) throw InvalidInput("--member out of range");
  const auto norms = SobolevNormSpec::from_grid(s.grid);
  auto modes = battery_modes(battery, f.member, op, norms, t0, T, dir);
  if (f.modes && *f.modes < modes.size()) modes.resize(*f.modes);

  IntegrateOptions opt;
  opt.rtol = f.tol.value_or(s.rtol);
  opt.atol = f.tol ? *f.tol * 1e-2 : s.atol;
  opt.samples = s.samples;
  opt.keep_dense = false;
  const auto res = sweep(modes, opt, c.workers);

  const std::size_t n = op->layout.n;
  auto cols = std::vector<std::string>{"mode"};
  for (auto& x : xi_columns(n)) cols.push_back(x);
  for (const char* k : {"ok", "accepted", "rejected", "max_residual", "residual_ok", "error"}) cols.push_back(k);
  Csv summary(c.out / "simulate.csv", cols);
  std::size_t failures = 0, residual_failures = 0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    append(row, modes[i].xi);
    if (!res[i].ok()) {
      ++failures;
      row.insert(row.end(), {"0", "", "", "", "", res[i].error_kind});
      summary.row(row);
      continue;
    }
    const auto& tr = *res[i].trajectory;
    residual_failures += !tr.residual_ok();
    row.insert(row.end(), {"1", std::to_string(tr.stats.accepted), std::to_string(tr.stats.rejected),
                           num(tr.max_residual()), tr.residual_ok() ? "1" : "0", ""});
    summary.row(row);

    char name[32];
    std::snprintf(name, sizeof name, "simulate_mode_%03zu.csv", i);
    Csv csv(c.out / name, {"s", "re_u", "im_u", "abs_du", "abs_d2u", "residual"});
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      csv.row({num(tr.times[k]), num(tr.u[k].real()), num(tr.u[k].imag()), num(std::abs(tr.du[k])),
               num(std::abs(tr.d2u[k])), num(tr.residual[k])});
    }
  }
  auto r = header(c, "simulate");
  r["direction"] = to_string(dir);
  r["interval"] = {t0, T};
  r["rtol"] = opt.rtol;
  r["atol"] = opt.atol;
  r["member"] = f.member;
  r["modes"] = modes.size();
  r["failures"] = failures;
  r["residual_failures"] = residual_failures;
  r["residual_threshold"] = residual_threshold(opt.rtol);
  return finish(c, "simulate", std::move(r), failures == 0 && residual_failures == 0);
}

struct EstimateFlags {
  int N = 6;
  double lambda = 50;
  std::string direction = "forward";
  std::string battery;
};

int cmd_verify_estimate(Context& c, const EstimateFlags& f) {
  auto& s = c.scenario;
  auto op = std::make_shared<const ModelOperator>(need_operator(s));
  if (f.N < 0) throw InvalidInput("--N must be >= 0");
  if (!(f.lambda > 0)) throw InvalidInput("--lambda must be positive");
  const auto dir = parse_direction(f.direction);
  if (!f.battery.empty()) {
    std::ifstream in(f.battery);
    if (!in) throw InvalidInput("cannot open battery file " + f.battery);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw SchemaError("", std::string("battery file is not valid JSON: ") + e.what());
    }
    parse_battery(j, "", s);
    c.hash = scenario_hash(s);
  }

  const auto norms = SobolevNormSpec::from_grid(s.grid);
  const auto battery = s.make_battery();
  IntegrateOptions opt;
  opt.rtol = s.rtol;
  opt.atol = s.atol;
  opt.samples = s.samples;
  EstimateEngine engine(sweep_battery(battery, op, norms, s.t0, s.T, dir, opt, c.workers), norms, dir);

  std::vector<int> Ns = s.N_list;
  if (std::find(Ns.begin(), Ns.end(), f.N) == Ns.end()) Ns.push_back(f.N);
  std::sort(Ns.begin(), Ns.end());
  const auto fit = fit_constants(engine, Ns, s.lambda_grid);
  const FitRow* row = fit.row(f.N);

  json table = json::array();
  for (const auto& fr : fit.rows) {
    table.push_back({{"N", fr.N}, {"stabilized", fr.stabilized}, {"lambda0", fr.lambda0}, {"C", fr.C}});
  }
  auto r = header(c, "verify-estimate");
  r["direction"] = to_string(dir);
  r["N"] = f.N;
  r["lambda"] = f.lambda;
  r["interval"] = {s.t0, s.T};
  const auto orders = norm_orders(dir);
  r["norm_orders"] = {orders.d2, orders.d1, orders.d0};
  r["forcing_order"] = forcing_order(f.N);
  r["surrogate"] = "semi-discrete: Sobolev norms are weighted sums over the xi grid";
  r["xi_nodes"] = norms.nodes.size();
  r["battery_members"] = battery.members.size();
  r["fit"] = table;

  if (!row || !row->stabilized) {
    r["error"] = "no stabilization for this N on the lambda grid";
    return finish(c, "estimate_report", std::move(r), false);
  }
  const double C = s.C.value_or(row->C);
  r["C"] = C;
  r["C_source"] = s.C ? "scenario" : "fit";
  r["lambda0"] = row->lambda0;

  const std::size_t n = op->layout.n;
  auto cols = std::vector<std::string>{"member"};
  for (auto& x : xi_columns(n)) cols.push_back(x);
  for (const char* k : {"weight", "lhs", "rhs"}) cols.push_back(k);
  Csv csv(c.out / "estimate_modes.csv", cols);

  bool pass = f.lambda >= row->lambda0;
  json members = json::array();
  for (std::size_t m = 0; m < engine.members(); ++m) {
    const auto rep = engine.report(m, f.lambda, f.N, C);
    pass = pass && rep.pass;
    members.push_back({{"member", m}, {"lhs", rep.lhs}, {"rhs", rep.rhs}, {"ratio", rep.ratio}, {"pass", rep.pass}});
    for (const auto& mc : rep.modes) {
      std::vector<std::string> cells{std::to_string(m)};
      append(cells, mc.xi);
      cells.insert(cells.end(), {num(mc.weight), num(mc.lhs), num(mc.rhs)});
      csv.row(cells);
    }
  }
  r["members"] = std::move(members);

  // Ratios must stay below C and decrease along 2, 4, 8 lambda0.
  bool ladder_pass = true;
  json ladder = json::array();
  std::vector<double> prev;
  for (double k : {2.0, 4.0, 8.0}) {
    const double lam = k * row->lambda0;
    const auto ratios = engine.ratios(lam, f.N);
    double worst = 0;
    for (std::size_t m = 0; m < ratios.size(); ++m) {
      worst = std::max(worst, ratios[m]);
      if (ratios[m] > C) ladder_pass = false;
      if (!prev.empty() && ratios[m] > prev[m]) ladder_pass = false;
    }
    prev = ratios;
    ladder.push_back({{"lambda", lam}, {"max_ratio", worst}});
  }
  r["ladder"] = std::move(ladder);
  r["ladder_pass"] = ladder_pass;
  r["estimate_pass"] = pass;
  return finish(c, "estimate_report", std::move(r), pass && ladder_pass);
}

json growth_json(const GrowthReport& g) {
  json j{{"verdict", to_string(g.verdict)},
         {"k", g.k},
         {"poly", {{"k", g.poly.k}, {"c0", g.poly.c0}, {"sse", g.poly.sse}}},
         {"expo",
          {{"c", g.expo.c}, {"sigma", g.expo.sigma}, {"k", g.expo.k}, {"c0", g.expo.c0}, {"sse", g.expo.sse}}},
         {"sse_ratio", g.sse_ratio},
         {"extrapolation_gap", g.extrapolation_gap}};
  if (g.xi.size() >= 6) j["exponent_spread"] = exponent_spread(g, 6);
  return j;
}

int cmd_probe(const Context& c) {
  const auto& s = c.scenario;
  GrowthReport g;
  std::optional<GrowthVerdict> expect;
  std::string kind;
  if (s.second_order) {
    const auto& so = *s.second_order;
    g = probe_second_order(so.example, so.first_octave, so.last_octave, so.options, c.workers);
    expect = so.expect;
    kind = "second_order";
  } else {
    const auto& op = need_operator(s);
    ProbeOptions po;
    po.first_octave = s.probe.first_octave;
    po.last_octave = s.probe.last_octave;
    po.directions = s.probe.directions;
    po.T = s.probe.T;
    g = probe_model_operator(std::make_shared<const ModelOperator>(op), po, c.workers);
    expect = s.probe.expect;
    kind = "model_operator";
  }
  Csv csv(c.out / "probe.csv", {"xi", "magnitude"});
  for (std::size_t i = 0; i < g.xi.size(); ++i) csv.row({num(g.xi[i]), num(g.magnitude[i])});
  auto r = header(c, "probe");
  r["kind"] = kind;
  r["growth"] = growth_json(g);
  if (expect) r["expect"] = to_string(*expect);
  return finish(c, "probe", std::move(r), !expect || *expect == g.verdict);
}

int cmd_oleinik(const Context& c) {
  const auto& so = need_second_order(c.scenario);
  const auto& ex = so.example;
  auto r = header(c, "oleinik");
  const auto b1 = ex.b1(ex.t0, ex.x0);
  r["basepoint"] = {ex.t0, ex.x0};
  r["a_tt"] = ex.a_tt();
  r["b1"] = cplx_json(b1);
  if (so.expect_loss) r["expect_loss"] = *so.expect_loss;
  try {
    const int N = oleinik_loss_count(ex);
    r["status"] = "Evaluated";
    r["N"] = N;
    return finish(c, "oleinik", std::move(r), !so.expect_loss || *so.expect_loss == N);
  } catch (const IllPosedCase& e) {
    r["status"] = "IllPosedCase";
    r["message"] = e.what();
  } catch (const DegenerateCase& e) {
    r["status"] = "DegenerateCase";
    r["message"] = e.what();
  }
  return finish(c, "oleinik", std::move(r), false);
}

struct ScaleFlags {
  std::optional<double> epsilon;
  std::optional<int> N;
  double coupling = 1.0;
};

int cmd_scale(const Context& c, const ScaleFlags& f) {
  const auto& s = c.scenario;
  const auto& op = need_operator(s);
  if (!f.epsilon && !f.N) throw InvalidInput("scale needs --epsilon or --N");
  const auto cp = resolve_coupling(f.epsilon, f.N, f.coupling);
  const auto r = rescale_operator(op, cp.epsilon);
  const bool identity = rescale_operator(op, 1.0).op == op;

  json terms = json::array();
  for (const auto& t : r.terms) {
    terms.push_back({{"name", t.name},
                     {"prefactor", t.prefactor.to_string()},
                     {"prefactor_value", t.prefactor.value()},
                     {"coefficient", monomials_to_json(t.coefficient, op.layout, t.name == "C")}});
  }
  json groups = json::array();
  for (const auto& [p, names] : r.groups()) groups.push_back({{"prefactor", p.to_string()}, {"terms", names}});

  const OrderFunction of{&op, cp.N, 0.0};
  const auto sv = slow_variation_check(of, s.T, 2000, s.seed);
  const auto dq = derivative_quotients(op, cp.N, s.T, 500, s.seed);
  const bool finite = std::isfinite(sv.max_ratio) && std::isfinite(sv.min_ratio) &&
                      std::isfinite(dq.order[1]) && std::isfinite(dq.order[2]);

  auto out = header(c, "scale");
  out["coupling"] = {{"epsilon", cp.epsilon}, {"N", cp.N}, {"constant", f.coupling}};
  out["terms"] = std::move(terms);
  out["groups"] = std::move(groups);
  out["rescaled_operator"] = operator_to_json(r.op);
  out["identity_at_one"] = identity;
  out["diagnostics"] = {{"heuristic", true},
                        {"t", s.T},
                        {"slow_variation",
                         {{"samples", sv.samples}, {"max_ratio", sv.max_ratio}, {"min_ratio", sv.min_ratio}}},
                        {"derivative_quotients", {dq.order[0], dq.order[1], dq.order[2]}}};
  return finish(c, "scale", std::move(out), identity && finite);
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Numerical laboratory for third-order operators with triple characteristics", "trichar"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TRICHAR_VERSION);

  std::string scenario_path, out_dir;
  std::size_t workers = 0;
  std::optional<std::uint64_t> seed;
  app.add_option("--scenario", scenario_path, "Scenario JSON file");
  app.add_option("--out", out_dir, "Output directory (default: the scenario's output field)");
  app.add_option("--workers", workers, "Worker threads, 0 = hardware concurrency");
  app.add_option("--seed", seed, "Override the scenario seed");

  auto* roots = app.add_subcommand("roots", "Characteristic roots, discriminant and root separation scan");
  auto* geometry = app.add_subcommand("geometry", "Fundamental matrix spectra on t = 0");

  SimulateFlags sf;
  auto* simulate = app.add_subcommand("simulate", "Integrate the Fourier modes of one battery member");
  simulate->add_option("--modes", sf.modes, "Number of grid modes to run");
  simulate->add_option("--tol", sf.tol, "Relative tolerance");
  simulate->add_option("--t0", sf.t0, "Interval start");
  simulate->add_option("--T", sf.T, "Interval end");
  simulate->add_option("--direction", sf.direction, "forward or backward");
  simulate->add_option("--member", sf.member, "Battery member");

  EstimateFlags ef;
  auto* verify = app.add_subcommand("verify-estimate", "Check the weighted energy estimate on the battery");
  verify->add_option("--N", ef.N, "Loss parameter N");
  verify->add_option("--lambda", ef.lambda, "Weight exponent lambda");
  verify->add_option("--direction", ef.direction, "forward or backward");
  verify->add_option("--battery", ef.battery, "Battery JSON file overriding the scenario battery");

  auto* probe = app.add_subcommand("probe", "Growth of mode magnitudes across frequency octaves");
  auto* oleinik = app.add_subcommand("oleinik", "Loss-of-derivatives count of the second-order example");

  ScaleFlags scf;
  auto* scale = app.add_subcommand("scale", "Scaling substitution and order-function diagnostics");
  auto* eps_opt = scale->add_option("--epsilon", scf.epsilon, "Scaling parameter in (0, 1]");
  auto* n_opt = scale->add_option("--N", scf.N, "Loss parameter; epsilon follows from the coupling");
  eps_opt->excludes(n_opt);
  scale->add_option("--coupling", scf.coupling, "Coupling constant c in epsilon N <= c");

  auto* selftest = app.add_subcommand("selftest", "Quick invariant suite");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kInputError;
  }

  Context c;
  c.workers = workers;
  if (selftest->parsed()) {
    bool pass = false;
    auto r = run_selftest(workers, pass);
    r["tool"] = "trichar";
    r["version"] = TRICHAR_VERSION;
    for (const auto& chk : r["checks"]) {
      std::cout << (chk["pass"].get<bool>() ? "pass " : "FAIL ") << chk["name"].get<std::string>() << '\n';
    }
    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      write_json(fs::path(out_dir) / "selftest.json", r);
    }
    return pass ? kPass : kVerificationFailure;
  }

  if (scenario_path.empty()) throw InvalidInput("--scenario is required");
  c.scenario = load_scenario(scenario_path);
  if (seed) {
    c.scenario.seed = *seed;
    c.scenario.battery.seed = *seed;
    c.scenario.grid.seed = *seed;
  }
  c.hash = scenario_hash(c.scenario);
  c.out = out_dir.empty() ? fs::path(c.scenario.output) : fs::path(out_dir);
  fs::create_directories(c.out);

  if (roots->parsed()) return cmd_roots(c);
  if (geometry->parsed()) return cmd_geometry(c);
  if (simulate->parsed()) return cmd_simulate(c, sf);
  if (verify->parsed()) return cmd_verify_estimate(c, ef);
  if (probe->parsed()) return cmd_probe(c);
  if (oleinik->parsed()) return cmd_oleinik(c);
  if (scale->parsed()) return cmd_scale(c, scf);
  return kInputError;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  try {
    return dispatch(args);
  } catch (const SchemaError& e) {
    const std::string what = e.what();
    std::cerr << "input error at " << (e.pointer().empty() ? "/" : e.pointer()) << ": "
              << what.substr(e.pointer().size() + 2) << '\n';
    return kInputError;
  } catch (const InsufficientData& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const InvalidInput& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "verification failure: " << e.what() << '\n';
    return kVerificationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace trichar::cli
