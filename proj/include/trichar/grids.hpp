#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace trichar {

/// Deterministic unit covectors in R^n, closed under w -> -w.
/// n = 1: {+1, -1}. n = 2: `count` equally spaced angles (count rounded up
/// to even). n >= 3: +-e_i followed by seeded random pairs up to `count`.
std::vector<std::vector<double>> unit_directions(std::size_t n,
                                                 std::size_t count,
                                                 std::uint64_t seed = 1);

/// Radial/angular frequency grid |xi| = 2^{k / per_octave} for
/// k in [first_octave * per_octave, last_octave * per_octave] times
/// `unit_directions`.
struct XiGridSpec {
  std::size_t n = 2;
  int first_octave = 0;
  int last_octave = 5;
  int per_octave = 1;
  std::size_t directions = 8;
  std::uint64_t seed = 1;
};

struct XiNode {
  std::vector<double> xi;
  double magnitude = 0;
  double weight = 0;  ///< polar quadrature weight, > 0
};

std::vector<XiNode> build_xi_grid(const XiGridSpec& spec);

/// Seeded uniform generator with a platform-independent mapping from
/// mt19937_64 output to doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  double uniform();                  ///< [0, 1)
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 gen_;
};

}  // namespace trichar
