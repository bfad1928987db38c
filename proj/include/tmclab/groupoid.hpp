#pragma once

// Stable and unstable groupoids over eventually periodic points: the
// first-time map, base sets with their holonomies, and the groupoid ultrametric.
// The unstable side is handled by conjugating with time reversal.

#include <vector>

#include "tmclab/sft.hpp"

namespace tmc {

struct GroupoidElement {
  Point first;
  Point second;
  Side side = Side::Stable;
  friend bool operator==(const GroupoidElement&, const GroupoidElement&) = default;
  friend auto operator<=>(const GroupoidElement&, const GroupoidElement&) = default;
};

std::string element_str(const GroupoidElement& a);
inline std::ostream& operator<<(std::ostream& os, const GroupoidElement& a) { return os << element_str(a); }

struct ElementHash {
  std::size_t operator()(const GroupoidElement& a) const noexcept;
};

inline GroupoidElement unit(const Point& x, Side side = Side::Stable) { return {x, x, side}; }

// Reverses both coordinates and swaps the side; an involution.
GroupoidElement time_reverse(const GroupoidElement& a);

// Stable side: right tails eventually equal and both left tails on Q.
// Unstable side: left tails eventually equal and both right tails on P.
bool is_valid_element(const GroupoidElement& a, const PeriodicOrbit& p, const PeriodicOrbit& q);

// First N >= 0 with phi^N(a2) in X^s(phi^N(a1), 1/kappa), from the last disagreement
// index. On the unstable side the same quantity for the time-reversed element.
// Throws InvalidInput if the coordinates are not equivalent on the element's side.
Index c_s(const GroupoidElement& a);
// Definitional search with the local-set oracle; returns -1 past the cap.
Index c_s_bruteforce(const GroupoidElement& a, Index cap = 256);

// Stable base set: holonomy h(z) = phi^{-N}[phi^N z, phi^N c1] on the disk
// X^u(c2, kappa^{-n-1}). Radius exponent n, time N, with c_s(c) <= N <= n.
struct BaseSet {
  GroupoidElement anchor;
  Index radius_exp = 0;
  Index time = 0;
  friend bool operator==(const BaseSet&, const BaseSet&) = default;
};

// Validates the invariants; throws InvalidInput.
BaseSet make_base_set(const GroupoidElement& anchor, Index radius_exp, Index time);

bool in_holonomy_domain(const BaseSet& v, const Point& z);
// Throws OutsideDomain.
Point holonomy_apply(const BaseSet& v, const Point& z);
// The element (h(z), z) of v above z; throws OutsideDomain.
GroupoidElement base_set_element(const BaseSet& v, const Point& z);
bool base_set_membership(const BaseSet& v, const GroupoidElement& b);

// Groupoid ultrametric: max of the coordinate distances when c_s agrees and both
// coordinate pairs agree on i <= 0 (on i >= 0 for the unstable side), else 1.
// Throws SideMismatch.
KDist groupoid_distance(const GroupoidElement& a, const GroupoidElement& b);
double groupoid_metric(const GroupoidElement& a, const GroupoidElement& b, const MetricParams& p);

// The same formula with the strict local sets X^u(., 1/kappa) (agreement on i <= 1).
// Kept to exhibit that the lower Lipschitz bound for Phi^{-1} fails under it.
KDist groupoid_distance_strict(const GroupoidElement& a, const GroupoidElement& b);

// Pull-back of the groupoid metric to units: d(x, y) if x, y agree on i <= 0, else 1.
KDist units_distance(const Point& x, const Point& y, Side side = Side::Stable);

// Coordinatewise phi^k.
GroupoidElement phi_auto(const GroupoidElement& a, Index k);

GroupoidElement inverse(const GroupoidElement& a);
// Throws NotComposable unless source(a) == range(b) and the sides match.
GroupoidElement compose(const GroupoidElement& a, const GroupoidElement& b);
inline const Point& range(const GroupoidElement& a) { return a.first; }
inline const Point& source(const GroupoidElement& a) { return a.second; }

// All stable-side elements (x, y) with x, y from enumerate_homoclinic(P, Q, L).
std::vector<GroupoidElement> enumerate_stable_elements(const TransitionMatrix& m, const PeriodicOrbit& p,
                                                       const PeriodicOrbit& q, int core_bound);

}  // namespace tmc
