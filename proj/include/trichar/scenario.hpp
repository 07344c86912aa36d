#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trichar/energy_verifier.hpp"
#include "trichar/grids.hpp"
#include "trichar/symbol_core.hpp"
#include "trichar/wellposedness_probe.hpp"

namespace trichar {

using json = nlohmann::json;

/// Settings for the third-order model probe.
struct ModelProbeSpec {
  int first_octave = 0, last_octave = 10;
  std::size_t directions = 4;
  double T = 1;
  std::optional<GrowthVerdict> expect;
};

/// Second-order example plus its probe window. The window may extend past
/// t = 1; it is not the scenario interval.
struct SecondOrderSpec {
  SecondOrderExample example;
  SecondOrderOptions options;
  int first_octave = 0, last_octave = 10;
  std::optional<GrowthVerdict> expect;
  std::optional<int> expect_loss;
};

struct Scenario {
  std::string name;
  std::optional<ModelOperator> op;
  std::vector<double> x;  ///< frozen spatial point, size n
  XiGridSpec grid;
  double t0 = 0, T = 0.5;
  std::size_t t_nodes = 51;  ///< symbol scans over [t0, T]
  std::uint64_t seed = 7;
  BatterySpec battery;
  /// Explicit forcings per member; empty means the seeded random battery.
  std::vector<std::vector<ForcingTerm>> forcings;
  std::vector<int> N_list{0, 2, 4, 6, 8};
  std::vector<double> lambda_grid;
  std::optional<double> C;
  double rtol = 1e-10, atol = 1e-12;
  std::size_t samples = 2049;
  ModelProbeSpec probe;
  std::optional<SecondOrderSpec> second_order;
  std::string output = "out";

  Battery make_battery() const;
};

/// Throws SchemaError with the JSON pointer of the first offending field.
Scenario parse_scenario(const json& doc);
/// Reads and parses a file; syntax errors become SchemaError at "".
Scenario load_scenario(const std::string& path);
json to_json(const Scenario& s);

/// Battery block on its own (the `battery` field of a scenario, also
/// accepted as a standalone file). `where` prefixes error pointers.
void parse_battery(const json& j, const std::string& where, Scenario& s);

json operator_to_json(const ModelOperator& op);
/// Monomial list {xi_exponents, [tau_exponent], t_poly, x_poly} of one coefficient.
json monomials_to_json(const Polynomial& p, const PhaseLayout& l, bool with_tau);
ModelOperator operator_from_json(const json& j, const std::string& where = "/operator");

/// "p/q", integer strings and plain numbers.
double parse_constant(const json& j, const std::string& where);

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string scenario_hash(const Scenario& s);
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace trichar
