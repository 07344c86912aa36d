#include "trichar/quadrature.hpp"

#include "trichar/errors.hpp"

namespace trichar {

double simpson(std::span<const double> values, double h) {
  const std::size_t n = values.size();
  if (n < 2) throw InvalidInput("simpson: need at least two samples");
  if (n == 2) return 0.5 * h * (values[0] + values[1]);
  const std::size_t last = (n % 2 == 1) ? n - 1 : n - 2;
  CompensatedSum acc;
  acc.add(values[0]);
  acc.add(values[last]);
  for (std::size_t i = 1; i < last; ++i) acc.add((i % 2 == 1 ? 4.0 : 2.0) * values[i]);
  double result = acc.value() * h / 3.0;
  if (last != n - 1) result += 0.5 * h * (values[n - 2] + values[n - 1]);
  return result;
}

std::vector<double> uniform_grid(double a, double b, std::size_t count) {
  if (count < 2) throw InvalidInput("uniform_grid: need at least two points");
  std::vector<double> g(count);
  const double h = (b - a) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = a + h * static_cast<double>(i);
  g.back() = b;
  return g;
}

}  // namespace trichar
