#include "trichar/polynomial.hpp"

#include <cmath>
#include <sstream>

#include "trichar/errors.hpp"

namespace trichar {

namespace {

double ipow(double base, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

}  // namespace

Polynomial Polynomial::constant(std::size_t nvars, double c) {
  Polynomial p(nvars);
  p.add_term(Exponents(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t index) {
  Exponents e(nvars, 0);
  e.at(index) = 1;
  return monomial(std::move(e), 1.0);
}

Polynomial Polynomial::monomial(Exponents exponents, double coef) {
  Polynomial p(exponents.size());
  p.add_term(exponents, coef);
  return p;
}

void Polynomial::add_term(const Exponents& exponents, double coef) {
  if (exponents.size() != nvars_) {
    throw InvalidInput("polynomial term has " +
                       std::to_string(exponents.size()) +
                       " exponents, expected " + std::to_string(nvars_));
  }
  for (int e : exponents) {
    if (e < 0) throw InvalidInput("negative exponent in polynomial term");
  }
  if (coef == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(exponents, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::evaluate(std::span<const double> z) const {
  if (z.size() != nvars_) {
    throw InvalidInput("polynomial evaluated with " + std::to_string(z.size()) +
                       " values, expected " + std::to_string(nvars_));
  }
  double sum = 0.0;
  for (const auto& [exps, coef] : terms_) {
    double term = coef;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (exps[i] != 0) term *= ipow(z[i], exps[i]);
    }
    sum += term;
  }
  return sum;
}

Polynomial Polynomial::derivative(std::size_t var) const {
  Polynomial d(nvars_);
  for (const auto& [exps, coef] : terms_) {
    if (exps.at(var) == 0) continue;
    Exponents e = exps;
    const int k = e[var]--;
    d.add_term(e, coef * k);
  }
  return d;
}

Polynomial Polynomial::scale_variables(std::span<const double> factors) const {
  if (factors.size() != nvars_) throw InvalidInput("scale_variables: size mismatch");
  Polynomial out(nvars_);
  for (const auto& [exps, coef] : terms_) {
    double c = coef;
    for (std::size_t i = 0; i < nvars_; ++i) c *= ipow(factors[i], exps[i]);
    out.add_term(exps, c);
  }
  return out;
}

Polynomial Polynomial::fix_variable(std::size_t var, double value) const {
  Polynomial out(nvars_);
  for (const auto& [exps, coef] : terms_) {
    Exponents e = exps;
    const int k = e.at(var);
    e[var] = 0;
    out.add_term(e, coef * ipow(value, k));
  }
  return out;
}

std::vector<double> Polynomial::univariate(std::size_t var,
                                           std::span<const double> z) const {
  if (z.size() != nvars_) throw InvalidInput("univariate: size mismatch");
  std::vector<double> coefs;
  for (const auto& [exps, coef] : terms_) {
    double c = coef;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (i != var && exps[i] != 0) c *= ipow(z[i], exps[i]);
    }
    const auto k = static_cast<std::size_t>(exps[var]);
    if (coefs.size() <= k) coefs.resize(k + 1, 0.0);
    coefs[k] += c;
  }
  return coefs;
}

int Polynomial::max_degree_in(std::span<const std::size_t> vars) const {
  int best = -1;
  for (const auto& [exps, coef] : terms_) {
    int d = 0;
    for (std::size_t v : vars) d += exps.at(v);
    best = std::max(best, d);
  }
  return best;
}

bool Polynomial::homogeneous_in(std::span<const std::size_t> vars,
                                int degree) const {
  for (const auto& [exps, coef] : terms_) {
    int d = 0;
    for (std::size_t v : vars) d += exps.at(v);
    if (d != degree) return false;
  }
  return true;
}

bool Polynomial::independent_of(std::size_t var) const {
  for (const auto& [exps, coef] : terms_) {
    if (exps.at(var) != 0) return false;
  }
  return true;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (nvars_ == 0 && terms_.empty()) nvars_ = other.nvars_;
  if (other.nvars_ != nvars_ && !other.terms_.empty()) {
    throw InvalidInput("polynomial sum: variable count mismatch");
  }
  for (const auto& [exps, coef] : other.terms_) add_term(exps, coef);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  return *this += other * -1.0;
}

Polynomial& Polynomial::operator*=(double c) {
  if (c == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [exps, coef] : terms_) coef *= c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.nvars_ != b.nvars_) throw InvalidInput("polynomial product: variable count mismatch");
  Polynomial out(a.nvars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Polynomial::Exponents e(a.nvars_);
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

double Polynomial::max_coef_distance(const Polynomial& other) const {
  double worst = 0.0;
  for (const auto& [exps, coef] : terms_) {
    auto it = other.terms_.find(exps);
    const double o = it == other.terms_.end() ? 0.0 : it->second;
    worst = std::max(worst, std::abs(coef - o));
  }
  for (const auto& [exps, coef] : other.terms_) {
    if (!terms_.contains(exps)) worst = std::max(worst, std::abs(coef));
  }
  return worst;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [exps, coef] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << coef;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (exps[i] != 0) os << "*z" << i << "^" << exps[i];
    }
  }
  return os.str();
}

double horner(std::span<const double> coefs, double s) {
  double r = 0.0;
  for (auto it = coefs.rbegin(); it != coefs.rend(); ++it) r = r * s + *it;
  return r;
}

}  // namespace trichar
