#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "trichar/errors.hpp"

namespace trichar {

/// Dormand-Prince 5(4) pair with the Hairer-Wanner order 4 continuous
/// extension. Works in either direction of time.
namespace dopri {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;

}  // namespace dopri

template <std::size_t D>
using State = std::array<double, D>;

/// One accepted step with its interpolation coefficients.
template <std::size_t D>
struct DenseSegment {
  double s0 = 0, h = 0;
  std::array<State<D>, 5> r{};

  State<D> value(double s) const {
    const double th = (s - s0) / h, th1 = 1 - th;
    State<D> y;
    for (std::size_t i = 0; i < D; ++i) {
      y[i] = r[0][i] +
             th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
    }
    return y;
  }

  /// d/ds of value(s).
  State<D> derivative(double s) const {
    const double th = (s - s0) / h, th1 = 1 - th;
    State<D> y;
    for (std::size_t i = 0; i < D; ++i) {
      const double q = r[2][i] + th * (r[3][i] + th1 * r[4][i]);
      const double dq = r[3][i] + (1 - 2 * th) * r[4][i];
      const double R = r[1][i] + th1 * q;
      const double dR = -q + th1 * dq;
      y[i] = (R + th * dR) / h;
    }
    return y;
  }
};

template <std::size_t D>
class DenseOutput {
 public:
  std::vector<DenseSegment<D>> segments;  ///< ordered by increasing s

  bool empty() const { return segments.empty(); }

  const DenseSegment<D>& locate(double s) const {
    auto it = std::upper_bound(
        segments.begin(), segments.end(), s,
        [](double v, const DenseSegment<D>& seg) { return v < std::min(seg.s0, seg.s0 + seg.h); });
    if (it != segments.begin()) --it;
    return *it;
  }

  State<D> value(double s) const { return locate(s).value(s); }
  State<D> derivative(double s) const { return locate(s).derivative(s); }
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
  double h_min = std::numeric_limits<double>::infinity();
  double h_max = 0;
};

struct DopriOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  std::size_t max_steps = 1000000;
  std::size_t fixed_steps = 0;  ///< > 0 disables error control
  double h_initial = 0;         ///< 0 selects automatically
};

/// Integrates y' = f(s, y) from s0 to s1 (either order). `f(s, y, dy)` fills
/// dy. Returns the final state; dense output and statistics via pointers.
template <std::size_t D, typename F>
State<D> dopri_integrate(F&& f, double s0, double s1, State<D> y,
                         const DopriOptions& opt, DenseOutput<D>* dense,
                         StepStats* stats) {
  using namespace dopri;
  StepStats st;
  const double dir = s1 >= s0 ? 1.0 : -1.0;
  const double span = std::abs(s1 - s0);
  if (dense) dense->segments.clear();
  if (span == 0) {
    if (stats) *stats = st;
    return y;
  }

  auto scale = [&](const State<D>& a, const State<D>& b, std::size_t i) {
    return opt.atol + opt.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
  };

  State<D> k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
  f(s0, y, k1);
  ++st.rhs_evals;

  double h;
  if (opt.fixed_steps > 0) {
    h = span / static_cast<double>(opt.fixed_steps);
  } else if (opt.h_initial > 0) {
    h = opt.h_initial;
  } else {
    // Hairer-Wanner starting step.
    double d0 = 0, d1n = 0;
    for (std::size_t i = 0; i < D; ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1n += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / D);
    d1n = std::sqrt(d1n / D);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, span);
    for (std::size_t i = 0; i < D; ++i) tmp[i] = y[i] + dir * h0 * k1[i];
    f(s0 + dir * h0, tmp, k2);
    ++st.rhs_evals;
    double d2 = 0;
    for (std::size_t i = 0; i < D; ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(y[i]);
      d2 += ((k2[i] - k1[i]) / sc) * ((k2[i] - k1[i]) / sc);
    }
    d2 = std::sqrt(d2 / D) / h0;
    const double m = std::max(d1n, d2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    h = std::min({100 * h0, h1, span});
  }

  double s = s0;
  double err_old = 1e-4;
  bool last_rejected = false;
  std::size_t steps = 0;
  while (dir * (s1 - s) > 0) {
    if (++steps > opt.max_steps) {
      if (stats) *stats = st;
      throw ToleranceUnachievable(s, "step budget exhausted before reaching the endpoint");
    }
    bool final_step = false;
    if (h >= std::abs(s1 - s) * (1 - 1e-12)) {
      h = std::abs(s1 - s);
      final_step = true;
    }
    if (h <= 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s))) {
      if (stats) *stats = st;
      throw StepFailure(s, "step size underflow");
    }
    const double hs = dir * h;

    for (std::size_t i = 0; i < D; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
    f(s + c2 * hs, tmp, k2);
    for (std::size_t i = 0; i < D; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    f(s + c3 * hs, tmp, k3);
    for (std::size_t i = 0; i < D; ++i)
      tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(s + c4 * hs, tmp, k4);
    for (std::size_t i = 0; i < D; ++i)
      tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(s + c5 * hs, tmp, k5);
    for (std::size_t i = 0; i < D; ++i)
      tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                            a65 * k5[i]);
    const double snew = final_step ? s1 : s + hs;
    f(snew, tmp, k6);
    for (std::size_t i = 0; i < D; ++i)
      ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                             a76 * k6[i]);
    f(snew, ynew, k7);
    st.rhs_evals += 6;

    bool finite = true;
    for (double v : ynew) finite = finite && std::isfinite(v);
    if (!finite) {
      if (stats) *stats = st;
      throw StepFailure(s, "non-finite state");
    }

    double err = 0;
    if (opt.fixed_steps == 0) {
      for (std::size_t i = 0; i < D; ++i) {
        const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                               e6 * k6[i] + e7 * k7[i]);
        const double r = e / scale(y, ynew, i);
        err += r * r;
      }
      err = std::sqrt(err / D);
    }

    if (err <= 1.0) {
      if (dense) {
        DenseSegment<D> seg;
        seg.s0 = s;
        seg.h = snew - s;
        for (std::size_t i = 0; i < D; ++i) {
          const double ydiff = ynew[i] - y[i];
          const double bspl = hs * k1[i] - ydiff;
          seg.r[0][i] = y[i];
          seg.r[1][i] = ydiff;
          seg.r[2][i] = bspl;
          seg.r[3][i] = ydiff - hs * k7[i] - bspl;
          seg.r[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                              d6 * k6[i] + d7 * k7[i]);
        }
        dense->segments.push_back(seg);
      }
      ++st.accepted;
      st.h_min = std::min(st.h_min, h);
      st.h_max = std::max(st.h_max, h);
      y = ynew;
      k1 = k7;
      s = snew;
      if (opt.fixed_steps == 0) {
        // PI controller (beta = 0.04).
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.17) * std::pow(err_old, 0.04);
        fac = std::clamp(fac, 0.2, 10.0);
        if (last_rejected) fac = std::min(fac, 1.0);
        h *= fac;
        err_old = std::max(err, 1e-4);
        last_rejected = false;
      }
    } else {
      ++st.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      last_rejected = true;
    }
  }
  if (dense && dir < 0) {
    std::reverse(dense->segments.begin(), dense->segments.end());
  }
  if (stats) *stats = st;
  return y;
}

}  // namespace trichar
