#pragma once

// JSON scenarios: the chain, its orbits, the functions under study and the
// numerical settings shared by the commands.

#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"
#include "tmclab/functions.hpp"

namespace tmc {

struct Scenario {
  std::string name;
  TransitionMatrix matrix;
  MetricParams metric;
  PeriodicOrbit p, q;
  int core_bound = 3;
  Index window_lo = -8, window_hi = 24;
  std::size_t basis_cap = 20000;
  std::map<std::string, Function> functions;
  std::vector<double> p_grid{0.5, 1.0, 1.5, 2.0};
  std::uint64_t seed = 1;
  std::uint64_t samples = 10000;
  // spectrum command
  std::string a_name = "a", b_name = "b";
  CommutatorKind kind = CommutatorKind::Plain;
  // fredholm command: unit-space projection e and a window for the inflated operators
  std::string e_name = "e";
  Index fredholm_lo = -4, fredholm_hi = 10;

  nlohmann::json source;  // the parsed document
  std::string hash;       // FNV-1a 64 of the canonical dump, 16 hex digits

  const Function& function(const std::string& name) const;  // throws InvalidInput
};

// Throws Error (InvalidInput, ZeroRowOrColumn, NotIrreducible, OrbitsNotDisjoint)
// on anything malformed; the CLI maps these to exit code 2.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

// {side, terms: [{anchor: [x, y], radius_exp, time, coeff: [re, im], series?}]}
Function parse_function(const nlohmann::json& desc);
nlohmann::json function_to_json(const Function& f);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace tmc
