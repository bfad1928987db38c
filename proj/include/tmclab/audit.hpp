#pragma once

// Property suites over homoclinic enumerations: exact structure (bracket,
// contraction, ultrametric, isometries), the dynamics of the groupoid metric
// under the automorphism, and the chain-metric engine.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tmclab/auf.hpp"

namespace tmc {

struct PropertyCheck {
  std::string name;
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  std::string first_counterexample;
  bool ok() const { return violations == 0; }
  void record(bool pass, const std::string& what);
  void record(bool pass, const std::function<std::string()>& what);
};

struct AuditReport {
  std::vector<PropertyCheck> checks;
  bool ok() const;
  std::uint64_t violations() const;
  const PropertyCheck* find(const std::string& name) const;
};

using DistanceFn = std::function<KDist(const GroupoidElement&, const GroupoidElement&)>;

struct AuditInput {
  TransitionMatrix matrix;
  PeriodicOrbit p, q;
  int core_bound = 3;
  std::uint64_t samples = 10000;  // sampled element pairs and triples
  std::uint64_t seed = 1;
};

// Point-level properties run over every pair or triple of the enumeration:
// bracket axioms B1-B4, contraction with equality C1 (stable) and C2 (unstable),
// the strong triangle inequality of the point metric. Element-level properties
// (groupoid strong triangle, inversion isometry) use `samples` random pairs or
// triples; holonomy isometry and source/range local isometry run over base sets
// anchored at `samples` / 64 random elements, with domains enumerated on six free
// coordinates past the disk.
AuditReport structure_audit(const AuditInput& in, const DistanceFn& d = groupoid_distance);

// On `samples` pairs, half of them uniform and half drawn from pairs agreeing on
// i <= 0 in both coordinates: kappa^{-1} D <= D o Phi^{-1} <= D, and equality
// D o Phi^{-1} = kappa^{-1} D whenever D <= kappa^{-1}.
AuditReport dynamics_audit(const AuditInput& in, const DistanceFn& d = groupoid_distance);

struct AufAudit {
  AuditReport report;  // sandwich and star checks
  DiameterReport diameter;
  std::size_t sample_size = 0;
};

// Cover-derived rho table and chain metric on `sample_size` elements, star
// refinement on up to `triples` triples, and the diameter-bound regression.
AufAudit auf_audit(const AuditInput& in, std::size_t sample_size, std::size_t triples);

}  // namespace tmc
