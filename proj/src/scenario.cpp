#include "trichar/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "trichar/errors.hpp"

namespace trichar {

namespace {

std::string at(const std::string& where, const std::string& key) { return where + "/" + key; }
std::string at(const std::string& where, std::size_t i) { return where + "/" + std::to_string(i); }

void require_object(const json& j, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw SchemaError(where, "expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw SchemaError(at(where, k), "unknown field");
  }
}

void require_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where, "expected an array");
}

double real_field(const json& obj, const std::string& where, const char* key, double def) {
  if (!obj.contains(key)) return def;
  return parse_constant(obj.at(key), at(where, key));
}

long int_value(const json& j, const std::string& where, long lo, long hi) {
  if (!j.is_number_integer()) throw SchemaError(where, "expected an integer");
  const long v = j.get<long>();
  if (v < lo || v > hi) {
    throw SchemaError(where, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return v;
}

long int_field(const json& obj, const std::string& where, const char* key, long def, long lo,
               long hi) {
  if (!obj.contains(key)) return def;
  return int_value(obj.at(key), at(where, key), lo, hi);
}

std::vector<int> exponent_list(const json& j, const std::string& where, std::size_t n) {
  require_array(j, where);
  if (j.size() != n) throw SchemaError(where, "expected " + std::to_string(n) + " exponents");
  std::vector<int> e;
  for (std::size_t i = 0; i < n; ++i) e.push_back(static_cast<int>(int_value(j[i], at(where, i), 0, 64)));
  return e;
}

cplx complex_value(const json& j, const std::string& where) {
  if (j.is_array()) {
    if (j.size() != 2) throw SchemaError(where, "expected [re, im]");
    return {parse_constant(j[0], at(where, 0)), parse_constant(j[1], at(where, 1))};
  }
  return {parse_constant(j, where), 0.0};
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

std::optional<GrowthVerdict> verdict_field(const json& obj, const std::string& where) {
  if (!obj.contains("expect")) return std::nullopt;
  const auto& v = obj.at("expect");
  for (auto g : {GrowthVerdict::PolynomialLoss, GrowthVerdict::SuperPolynomial}) {
    if (v.is_string() && v.get<std::string>() == to_string(g)) return g;
  }
  throw SchemaError(at(where, "expect"), "expected \"PolynomialLoss\" or \"SuperPolynomial\"");
}

// Coefficient of one role as a list of {xi_exponents, t_poly, x_poly}.
Polynomial coefficient_from_json(const json& j, const std::string& where, const PhaseLayout& l,
                                 int degree, bool with_tau) {
  require_array(j, where);
  Polynomial p(l.nvars());
  for (std::size_t m = 0; m < j.size(); ++m) {
    const auto w = at(where, m);
    const auto& mono = j[m];
    if (with_tau) {
      require_object(mono, w, {"xi_exponents", "tau_exponent", "t_poly", "x_poly", "coef"});
    } else {
      require_object(mono, w, {"xi_exponents", "t_poly", "x_poly", "coef"});
    }
    if (!mono.contains("xi_exponents")) throw SchemaError(at(w, "xi_exponents"), "missing");
    const auto alpha = exponent_list(mono.at("xi_exponents"), at(w, "xi_exponents"), l.n);
    int total = 0;
    for (int a : alpha) total += a;
    const int tau = with_tau ? static_cast<int>(int_field(mono, w, "tau_exponent", 0, 0, 1)) : 0;
    if (with_tau ? total + tau > degree : total != degree) {
      throw SchemaError(at(w, "xi_exponents"),
                        with_tau ? "order in (tau, xi) exceeds " + std::to_string(degree)
                                 : "xi degree must be " + std::to_string(degree));
    }
    const double scale = real_field(mono, w, "coef", 1.0);
    std::vector<double> tp{1.0};
    if (mono.contains("t_poly")) {
      const auto& t = mono.at("t_poly");
      require_array(t, at(w, "t_poly"));
      tp.clear();
      for (std::size_t k = 0; k < t.size(); ++k) tp.push_back(parse_constant(t[k], at(at(w, "t_poly"), k)));
    }
    std::vector<std::pair<std::vector<int>, double>> xp{{std::vector<int>(l.n, 0), 1.0}};
    if (mono.contains("x_poly")) {
      const auto xw = at(w, "x_poly");
      const auto& xs = mono.at("x_poly");
      require_array(xs, xw);
      xp.clear();
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const auto kw = at(xw, k);
        require_object(xs[k], kw, {"exponents", "coef"});
        if (!xs[k].contains("exponents")) throw SchemaError(at(kw, "exponents"), "missing");
        xp.push_back({exponent_list(xs[k].at("exponents"), at(kw, "exponents"), l.n),
                      real_field(xs[k], kw, "coef", 1.0)});
      }
    }
    for (std::size_t k = 0; k < tp.size(); ++k) {
      for (const auto& [ex, c] : xp) {
        Polynomial::Exponents e(l.nvars(), 0);
        e[l.t()] = static_cast<int>(k);
        e[l.tau()] = tau;
        for (std::size_t i = 0; i < l.n; ++i) {
          e[l.x(i)] = ex[i];
          e[l.xi(i)] = alpha[i];
        }
        p.add_term(e, scale * tp[k] * c);
      }
    }
  }
  return p;
}

// One monomial per (xi, tau, x) exponent group, t powers as a dense t_poly.
json coefficient_to_json(const Polynomial& p, const PhaseLayout& l, bool with_tau) {
  using Key = std::tuple<std::vector<int>, int, std::vector<int>>;
  std::map<Key, std::vector<double>> groups;
  for (const auto& [e, c] : p.terms()) {
    std::vector<int> alpha(l.n), ex(l.n);
    for (std::size_t i = 0; i < l.n; ++i) {
      alpha[i] = e[l.xi(i)];
      ex[i] = e[l.x(i)];
    }
    auto& tp = groups[{alpha, e[l.tau()], ex}];
    const auto k = static_cast<std::size_t>(e[l.t()]);
    if (tp.size() <= k) tp.resize(k + 1, 0.0);
    tp[k] = c;
  }
  json out = json::array();
  for (const auto& [key, tp] : groups) {
    const auto& [alpha, tau, ex] = key;
    json m;
    m["xi_exponents"] = alpha;
    if (with_tau) m["tau_exponent"] = tau;
    m["t_poly"] = tp;
    bool any = false;
    for (int v : ex) any |= v != 0;
    if (any) m["x_poly"] = json::array({json{{"exponents", ex}, {"coef", 1.0}}});
    out.push_back(std::move(m));
  }
  return out;
}

// Polynomial in (t, x) as [{t, x, coef}].
Polynomial tx_from_json(const json& j, const std::string& where) {
  require_array(j, where);
  Polynomial p(2);
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto w = at(where, k);
    require_object(j[k], w, {"t", "x", "coef"});
    p.add_term({static_cast<int>(int_field(j[k], w, "t", 0, 0, 64)),
                static_cast<int>(int_field(j[k], w, "x", 0, 0, 64))},
               real_field(j[k], w, "coef", 1.0));
  }
  return p;
}

json tx_to_json(const Polynomial& p) {
  json out = json::array();
  for (const auto& [e, c] : p.terms()) out.push_back({{"t", e[0]}, {"x", e[1]}, {"coef", c}});
  return out;
}

ComplexCoef complex_coef_from_json(const json& j, const std::string& where) {
  require_object(j, where, {"re", "im"});
  ComplexCoef c;
  if (j.contains("re")) c.re = tx_from_json(j.at("re"), at(where, "re"));
  if (j.contains("im")) c.im = tx_from_json(j.at("im"), at(where, "im"));
  return c;
}

json complex_coef_to_json(const ComplexCoef& c) {
  return {{"re", tx_to_json(c.re)}, {"im", tx_to_json(c.im)}};
}

SecondOrderSpec second_order_from_json(const json& j, const std::string& where) {
  require_object(j, where,
                 {"a", "b0", "b1", "c", "basepoint", "window", "data", "rtol", "atol", "samples",
                  "first_octave", "last_octave", "expect", "expect_loss"});
  SecondOrderSpec s;
  auto& ex = s.example;
  if (!j.contains("a")) throw SchemaError(at(where, "a"), "missing");
  ex.a = tx_from_json(j.at("a"), at(where, "a"));
  if (j.contains("b0")) ex.b0 = complex_coef_from_json(j.at("b0"), at(where, "b0"));
  if (j.contains("b1")) ex.b1 = complex_coef_from_json(j.at("b1"), at(where, "b1"));
  if (j.contains("c")) ex.c = complex_coef_from_json(j.at("c"), at(where, "c"));
  if (j.contains("basepoint")) {
    const auto& b = j.at("basepoint");
    const auto w = at(where, "basepoint");
    if (!b.is_array() || b.size() != 2) throw SchemaError(w, "expected [t0, x0]");
    ex.t0 = parse_constant(b[0], at(w, 0));
    ex.x0 = parse_constant(b[1], at(w, 1));
  }
  auto& o = s.options;
  if (j.contains("window")) {
    const auto& w = j.at("window");
    const auto ww = at(where, "window");
    if (!w.is_array() || w.size() != 2) throw SchemaError(ww, "expected [t_begin, t_end]");
    o.t_begin = parse_constant(w[0], at(ww, 0));
    o.t_end = parse_constant(w[1], at(ww, 1));
    if (!(o.t_end > o.t_begin)) throw SchemaError(ww, "t_end must exceed t_begin");
  }
  if (j.contains("data")) {
    const auto& d = j.at("data");
    const auto dw = at(where, "data");
    if (!d.is_array() || d.size() != 2) throw SchemaError(dw, "expected [u, u']");
    o.data = {complex_value(d[0], at(dw, 0)), complex_value(d[1], at(dw, 1))};
  }
  o.rtol = real_field(j, where, "rtol", o.rtol);
  o.atol = real_field(j, where, "atol", o.atol);
  if (!(o.rtol > 0)) throw SchemaError(at(where, "rtol"), "must be positive");
  if (!(o.atol > 0)) throw SchemaError(at(where, "atol"), "must be positive");
  o.samples = static_cast<std::size_t>(int_field(j, where, "samples", static_cast<long>(o.samples), 3, 1 << 20));
  s.first_octave = static_cast<int>(int_field(j, where, "first_octave", 0, 0, 30));
  s.last_octave = static_cast<int>(int_field(j, where, "last_octave", 10, 0, 30));
  if (s.last_octave < s.first_octave) {
    throw SchemaError(at(where, "last_octave"), "must be >= first_octave");
  }
  s.expect = verdict_field(j, where);
  if (j.contains("expect_loss")) {
    s.expect_loss = static_cast<int>(int_value(j.at("expect_loss"), at(where, "expect_loss"), 0, 1000));
  }
  return s;
}

json second_order_to_json(const SecondOrderSpec& s) {
  const auto& ex = s.example;
  const auto& o = s.options;
  json j{{"a", tx_to_json(ex.a)},
         {"b0", complex_coef_to_json(ex.b0)},
         {"b1", complex_coef_to_json(ex.b1)},
         {"c", complex_coef_to_json(ex.c)},
         {"basepoint", {ex.t0, ex.x0}},
         {"window", {o.t_begin, o.t_end}},
         {"data", {complex_json(o.data[0]), complex_json(o.data[1])}},
         {"rtol", o.rtol},
         {"atol", o.atol},
         {"samples", o.samples},
         {"first_octave", s.first_octave},
         {"last_octave", s.last_octave}};
  if (s.expect) j["expect"] = to_string(*s.expect);
  if (s.expect_loss) j["expect_loss"] = *s.expect_loss;
  return j;
}

}  // namespace

double parse_constant(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw SchemaError(where, "expected a number or a \"p/q\" string");
  const auto s = j.get<std::string>();
  long p = 0, q = 1;
  int used = 0;
  if (std::sscanf(s.c_str(), "%ld/%ld%n", &p, &q, &used) == 2 && used == static_cast<int>(s.size())) {
    if (q == 0) throw SchemaError(where, "zero denominator");
    return static_cast<double>(p) / static_cast<double>(q);
  }
  used = 0;
  if (std::sscanf(s.c_str(), "%ld%n", &p, &used) == 1 && used == static_cast<int>(s.size())) {
    return static_cast<double>(p);
  }
  throw SchemaError(where, "cannot read \"" + s + "\" as a rational constant");
}

json monomials_to_json(const Polynomial& p, const PhaseLayout& l, bool with_tau) {
  return coefficient_to_json(p, l, with_tau);
}

ModelOperator operator_from_json(const json& j, const std::string& where) {
  require_object(j, where, {"n", "delta0", "a1", "a2", "a3", "b", "B2", "B1", "C"});
  if (!j.contains("n")) throw SchemaError(at(where, "n"), "missing");
  const auto n = static_cast<std::size_t>(int_value(j.at("n"), at(where, "n"), 1, 8));
  auto op = ModelOperator::zero(n);
  const auto& l = op.layout;
  op.delta0 = real_field(j, where, "delta0", 1.0);
  if (!(op.delta0 > 0)) throw SchemaError(at(where, "delta0"), "must be positive");
  struct Role {
    const char* key;
    Polynomial* target;
    int degree;
    bool tau;
  };
  const Role roles[] = {{"a1", &op.a1.poly, 1, false}, {"a2", &op.a2.poly, 2, false},
                        {"a3", &op.a3.poly, 3, false}, {"b", &op.b.poly, 2, false},
                        {"B2", &op.lower.B2.poly, 2, false}, {"B1", &op.lower.B1.poly, 1, false},
                        {"C", &op.lower.C, 1, true}};
  for (const auto& r : roles) {
    if (j.contains(r.key)) *r.target = coefficient_from_json(j.at(r.key), at(where, r.key), l, r.degree, r.tau);
  }
  try {
    op.validate();
  } catch (const InvalidInput& e) {
    throw SchemaError(where, e.what());
  }
  return op;
}

json operator_to_json(const ModelOperator& op) {
  const auto& l = op.layout;
  json j{{"n", l.n}, {"delta0", op.delta0}};
  j["a1"] = coefficient_to_json(op.a1.poly, l, false);
  j["a2"] = coefficient_to_json(op.a2.poly, l, false);
  j["a3"] = coefficient_to_json(op.a3.poly, l, false);
  j["b"] = coefficient_to_json(op.b.poly, l, false);
  j["B2"] = coefficient_to_json(op.lower.B2.poly, l, false);
  j["B1"] = coefficient_to_json(op.lower.B1.poly, l, false);
  j["C"] = coefficient_to_json(op.lower.C, l, true);
  return j;
}

void parse_battery(const json& j, const std::string& where, Scenario& s) {
  require_object(j, where, {"members", "max_power", "omega_max", "decay", "forcings"});
  auto& b = s.battery;
  b.members = static_cast<std::size_t>(int_field(j, where, "members", static_cast<long>(b.members), 1, 1024));
  b.max_power = static_cast<int>(int_field(j, where, "max_power", b.max_power, 0, 16));
  b.omega_max = real_field(j, where, "omega_max", b.omega_max);
  b.decay = real_field(j, where, "decay", b.decay);
  if (!(b.omega_max >= 0)) throw SchemaError(at(where, "omega_max"), "must be >= 0");
  s.forcings.clear();
  if (j.contains("forcings")) {
    const auto fw = at(where, "forcings");
    const auto& fs = j.at("forcings");
    require_array(fs, fw);
    if (fs.empty()) throw SchemaError(fw, "needs at least one member");
    for (std::size_t m = 0; m < fs.size(); ++m) {
      const auto mw = at(fw, m);
      require_array(fs[m], mw);
      std::vector<ForcingTerm> terms;
      for (std::size_t k = 0; k < fs[m].size(); ++k) {
        const auto kw = at(mw, k);
        const auto& t = fs[m][k];
        require_object(t, kw, {"coef", "power", "omega"});
        ForcingTerm f;
        if (t.contains("coef")) f.coef = complex_value(t.at("coef"), at(kw, "coef"));
        f.power = static_cast<int>(int_field(t, kw, "power", 0, 0, 16));
        if (t.contains("omega")) f.omega = complex_value(t.at("omega"), at(kw, "omega"));
        terms.push_back(f);
      }
      s.forcings.push_back(std::move(terms));
    }
    b.members = s.forcings.size();
  }
}

Battery Scenario::make_battery() const {
  if (forcings.empty()) return trichar::make_battery(battery);
  Battery b;
  b.spec = battery;
  b.members = forcings;
  return b;
}

Scenario parse_scenario(const json& doc) {
  const std::string root;
  require_object(doc, root,
                 {"name", "operator", "point", "xi_grid", "interval", "t_nodes", "seed", "battery",
                  "verifier", "probe", "second_order", "output"});
  Scenario s;
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) throw SchemaError("/name", "expected a string");
    s.name = doc.at("name").get<std::string>();
  }
  if (doc.contains("output")) {
    if (!doc.at("output").is_string()) throw SchemaError("/output", "expected a string");
    s.output = doc.at("output").get<std::string>();
  }
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw SchemaError("/seed", "expected an unsigned integer");
    s.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (!doc.contains("operator") && !doc.contains("second_order")) {
    throw SchemaError("/operator", "a scenario needs an operator or a second_order example");
  }
  std::size_t n = 1;
  if (doc.contains("operator")) {
    s.op = operator_from_json(doc.at("operator"), "/operator");
    n = s.op->layout.n;
  }
  s.x.assign(n, 0.0);
  if (doc.contains("point")) {
    const auto& p = doc.at("point");
    if (!p.is_array() || p.size() != n) throw SchemaError("/point", "expected " + std::to_string(n) + " coordinates");
    for (std::size_t i = 0; i < n; ++i) s.x[i] = parse_constant(p[i], at("/point", i));
  }

  s.grid.n = n;
  if (doc.contains("xi_grid")) {
    const auto& g = doc.at("xi_grid");
    const std::string w = "/xi_grid";
    require_object(g, w, {"first_octave", "last_octave", "per_octave", "directions"});
    s.grid.first_octave = static_cast<int>(int_field(g, w, "first_octave", s.grid.first_octave, -10, 30));
    s.grid.last_octave = static_cast<int>(int_field(g, w, "last_octave", s.grid.last_octave, -10, 30));
    s.grid.per_octave = static_cast<int>(int_field(g, w, "per_octave", s.grid.per_octave, 1, 64));
    s.grid.directions = static_cast<std::size_t>(int_field(g, w, "directions", static_cast<long>(s.grid.directions), 1, 4096));
    if (s.grid.last_octave < s.grid.first_octave) {
      throw SchemaError("/xi_grid/last_octave", "must be >= first_octave");
    }
  }

  if (doc.contains("interval")) {
    const auto& iv = doc.at("interval");
    if (!iv.is_array() || iv.size() != 2) throw SchemaError("/interval", "expected [t0, T]");
    s.t0 = parse_constant(iv[0], "/interval/0");
    s.T = parse_constant(iv[1], "/interval/1");
  }
  if (!(s.t0 >= 0)) throw SchemaError("/interval/0", "t0 must be >= 0");
  if (!(s.T <= 1)) throw SchemaError("/interval/1", "T must be <= 1");
  if (!(s.t0 < s.T)) throw SchemaError("/interval/1", "T must exceed t0");
  s.t_nodes = static_cast<std::size_t>(int_field(doc, root, "t_nodes", static_cast<long>(s.t_nodes), 2, 1 << 20));

  if (doc.contains("battery")) parse_battery(doc.at("battery"), "/battery", s);
  s.battery.seed = s.seed;
  s.grid.seed = s.seed;

  s.lambda_grid = geometric_grid(1, 1024, std::sqrt(2.0));
  if (doc.contains("verifier")) {
    const auto& v = doc.at("verifier");
    const std::string w = "/verifier";
    require_object(v, w, {"N", "lambda", "C", "rtol", "atol", "samples"});
    if (v.contains("N")) {
      const auto& ns = v.at("N");
      require_array(ns, "/verifier/N");
      if (ns.empty()) throw SchemaError("/verifier/N", "needs at least one N");
      s.N_list.clear();
      for (std::size_t i = 0; i < ns.size(); ++i) {
        s.N_list.push_back(static_cast<int>(int_value(ns[i], at("/verifier/N", i), 0, 64)));
      }
    }
    if (v.contains("lambda")) {
      const auto& lg = v.at("lambda");
      const std::string lw = "/verifier/lambda";
      if (lg.is_array()) {
        s.lambda_grid.clear();
        for (std::size_t i = 0; i < lg.size(); ++i) {
          const double x = parse_constant(lg[i], at(lw, i));
          if (!(x > 0)) throw SchemaError(at(lw, i), "must be positive");
          if (!s.lambda_grid.empty() && !(x > s.lambda_grid.back())) {
            throw SchemaError(at(lw, i), "lambda grid must increase");
          }
          s.lambda_grid.push_back(x);
        }
      } else {
        require_object(lg, lw, {"lo", "hi", "factor"});
        const double lo = real_field(lg, lw, "lo", 1), hi = real_field(lg, lw, "hi", 1024),
                     f = real_field(lg, lw, "factor", std::sqrt(2.0));
        if (!(lo > 0)) throw SchemaError(lw + "/lo", "must be positive");
        if (!(hi >= lo)) throw SchemaError(lw + "/hi", "must be >= lo");
        if (!(f > 1)) throw SchemaError(lw + "/factor", "must exceed 1");
        s.lambda_grid = geometric_grid(lo, hi, f);
      }
    }
    if (v.contains("C")) {
      s.C = parse_constant(v.at("C"), "/verifier/C");
      if (!(*s.C > 0)) throw SchemaError("/verifier/C", "must be positive");
    }
    s.rtol = real_field(v, w, "rtol", s.rtol);
    s.atol = real_field(v, w, "atol", s.atol);
    if (!(s.rtol > 0)) throw SchemaError("/verifier/rtol", "must be positive");
    if (!(s.atol > 0)) throw SchemaError("/verifier/atol", "must be positive");
    s.samples = static_cast<std::size_t>(int_field(v, w, "samples", static_cast<long>(s.samples), 3, 1 << 20));
    if (s.samples % 2 == 0) throw SchemaError("/verifier/samples", "must be odd");
  }

  if (doc.contains("probe")) {
    const auto& p = doc.at("probe");
    const std::string w = "/probe";
    require_object(p, w, {"first_octave", "last_octave", "directions", "T", "expect"});
    auto& q = s.probe;
    q.first_octave = static_cast<int>(int_field(p, w, "first_octave", q.first_octave, 0, 30));
    q.last_octave = static_cast<int>(int_field(p, w, "last_octave", q.last_octave, 0, 30));
    if (q.last_octave < q.first_octave) throw SchemaError("/probe/last_octave", "must be >= first_octave");
    q.directions = static_cast<std::size_t>(int_field(p, w, "directions", static_cast<long>(q.directions), 1, 4096));
    q.T = real_field(p, w, "T", q.T);
    if (!(q.T > 0 && q.T <= 1)) throw SchemaError("/probe/T", "must lie in (0, 1]");
    q.expect = verdict_field(p, w);
  }
  if (doc.contains("second_order")) {
    s.second_order = second_order_from_json(doc.at("second_order"), "/second_order");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open scenario " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("not valid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

json to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["output"] = s.output;
  j["seed"] = s.seed;
  if (s.op) j["operator"] = operator_to_json(*s.op);
  j["point"] = s.x;
  j["xi_grid"] = {{"first_octave", s.grid.first_octave},
                  {"last_octave", s.grid.last_octave},
                  {"per_octave", s.grid.per_octave},
                  {"directions", s.grid.directions}};
  j["interval"] = {s.t0, s.T};
  j["t_nodes"] = s.t_nodes;
  json b{{"members", s.battery.members},
         {"max_power", s.battery.max_power},
         {"omega_max", s.battery.omega_max},
         {"decay", s.battery.decay}};
  if (!s.forcings.empty()) {
    json fs = json::array();
    for (const auto& m : s.forcings) {
      json terms = json::array();
      for (const auto& t : m) {
        terms.push_back({{"coef", complex_json(t.coef)}, {"power", t.power}, {"omega", complex_json(t.omega)}});
      }
      fs.push_back(std::move(terms));
    }
    b["forcings"] = std::move(fs);
  }
  j["battery"] = std::move(b);
  j["verifier"] = {{"N", s.N_list}, {"lambda", s.lambda_grid}, {"rtol", s.rtol},
                   {"atol", s.atol}, {"samples", s.samples}};
  if (s.C) j["verifier"]["C"] = *s.C;
  j["probe"] = {{"first_octave", s.probe.first_octave},
                {"last_octave", s.probe.last_octave},
                {"directions", s.probe.directions},
                {"T", s.probe.T}};
  if (s.probe.expect) j["probe"]["expect"] = to_string(*s.probe.expect);
  if (s.second_order) j["second_order"] = second_order_to_json(*s.second_order);
  return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string scenario_hash(const Scenario& s) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(s).dump())));
  return buf;
}

}  // namespace trichar
