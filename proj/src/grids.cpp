#include "trichar/grids.hpp"

#include <cmath>
#include <numbers>

#include "trichar/errors.hpp"

namespace trichar {

Rng::Rng(std::uint64_t seed) : gen_(seed) {}

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::vector<std::vector<double>> unit_directions(std::size_t n,
                                                 std::size_t count,
                                                 std::uint64_t seed) {
  if (n == 0) throw InvalidInput("unit_directions: n must be >= 1");
  std::vector<std::vector<double>> out;
  if (n == 1) {
    out.push_back({1.0});
    out.push_back({-1.0});
    return out;
  }
  if (n == 2) {
    const std::size_t m = std::max<std::size_t>(2, count + (count % 2));
    for (std::size_t k = 0; k < m; ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / m;
      out.push_back({std::cos(a), std::sin(a)});
    }
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    out.push_back(e);
    e[i] = -1.0;
    out.push_back(e);
  }
  Rng rng(seed);
  while (out.size() + 1 < count) {
    std::vector<double> w(n);
    double nrm = 0;
    for (auto& v : w) {
      v = rng.uniform(-1, 1);
      nrm += v * v;
    }
    nrm = std::sqrt(nrm);
    if (nrm < 1e-3 || nrm > 1) continue;
    for (auto& v : w) v /= nrm;
    out.push_back(w);
    for (auto& v : w) v = -v;
    out.push_back(w);
  }
  return out;
}

std::vector<XiNode> build_xi_grid(const XiGridSpec& spec) {
  if (spec.per_octave < 1 || spec.last_octave < spec.first_octave) {
    throw InvalidInput("xi grid: need per_octave >= 1 and first <= last octave");
  }
  const auto dirs = unit_directions(spec.n, spec.directions, spec.seed);
  const double nd = static_cast<double>(spec.n);
  const double sphere =
      2.0 * std::pow(std::numbers::pi, nd / 2) / std::tgamma(nd / 2);
  const double dlog = std::numbers::ln2 / spec.per_octave;
  std::vector<XiNode> nodes;
  for (int k = spec.first_octave * spec.per_octave;
       k <= spec.last_octave * spec.per_octave; ++k) {
    const double r = std::exp2(static_cast<double>(k) / spec.per_octave);
    const double w = std::pow(r, nd) * dlog * sphere / dirs.size();
    for (const auto& d : dirs) {
      XiNode node;
      node.xi = d;
      for (auto& v : node.xi) v *= r;
      node.magnitude = r;
      node.weight = w;
      nodes.push_back(std::move(node));
    }
  }
  return nodes;
}

}  // namespace trichar
