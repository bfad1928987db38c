#include "tmclab/groupoid.hpp"

namespace tmc {

namespace {

GroupoidElement as_stable(const GroupoidElement& a) { return a.side == Side::Stable ? a : time_reverse(a); }

BaseSet as_stable(const BaseSet& v) {
  return v.anchor.side == Side::Stable ? v : BaseSet{time_reverse(v.anchor), v.radius_exp, v.time};
}

Point to_side(const Point& z, Side s) { return s == Side::Stable ? z : reverse(z); }

KDist distance_with_window(const GroupoidElement& a0, const GroupoidElement& b0, Index window) {
  if (a0.side != b0.side) throw Error(Errc::SideMismatch, "elements live on different groupoids");
  if (a0 == b0) return KDist::zero();
  GroupoidElement a = as_stable(a0), b = as_stable(b0);
  if (c_s(a) != c_s(b)) return KDist::one();
  if (!agree_upto(a.first, b.first, window) || !agree_upto(a.second, b.second, window)) return KDist::one();
  return kmax(point_distance(a.first, b.first), point_distance(a.second, b.second));
}

}  // namespace

std::string element_str(const GroupoidElement& a) {
  return std::string(side_name(a.side)) + "(" + a.first.str() + ", " + a.second.str() + ")";
}

std::size_t ElementHash::operator()(const GroupoidElement& a) const noexcept {
  PointHash h;
  std::size_t x = h(a.first);
  x ^= h(a.second) + 0x9e3779b97f4a7c15ull + (x << 6) + (x >> 2);
  return x ^ static_cast<std::size_t>(a.side);
}

GroupoidElement time_reverse(const GroupoidElement& a) {
  return {reverse(a.first), reverse(a.second), opposite(a.side)};
}

bool is_valid_element(const GroupoidElement& a, const PeriodicOrbit& p, const PeriodicOrbit& q) {
  if (a.side == Side::Stable)
    return last_disagreement(a.first, a.second) != kPosInf && q.contains_tail(a.first.left()) &&
           q.contains_tail(a.second.left());
  return first_disagreement(a.first, a.second) != kNegInf && p.contains_tail(a.first.right()) &&
         p.contains_tail(a.second.right());
}

Index c_s(const GroupoidElement& a0) {
  GroupoidElement a = as_stable(a0);
  Index last = last_disagreement(a.first, a.second);
  if (last == kPosInf) throw Error(Errc::InvalidInput, "coordinates are not equivalent: " + element_str(a0));
  if (last == kNegInf) return 0;
  return std::max<Index>(0, last + 2);
}

Index c_s_bruteforce(const GroupoidElement& a0, Index cap) {
  GroupoidElement a = as_stable(a0);
  for (Index n = 0; n <= cap; ++n)
    if (local_set_membership(shift(a.first, n), shift(a.second, n), 1, Side::Stable)) return n;
  return -1;
}

BaseSet make_base_set(const GroupoidElement& anchor, Index radius_exp, Index time) {
  Index c = c_s(anchor);
  if (time < c) throw Error(Errc::InvalidInput, "base-set time below c_s of the anchor");
  if (radius_exp < time) throw Error(Errc::InvalidInput, "base-set radius exponent below its time");
  return {anchor, radius_exp, time};
}

bool in_holonomy_domain(const BaseSet& v0, const Point& z0) {
  BaseSet v = as_stable(v0);
  return agree_upto(to_side(z0, v0.anchor.side), v.anchor.second, v.radius_exp + 1);
}

Point holonomy_apply(const BaseSet& v0, const Point& z0) {
  if (!in_holonomy_domain(v0, z0)) throw Error(Errc::OutsideDomain, z0.str() + " is outside the holonomy disk");
  BaseSet v = as_stable(v0);
  Point z = to_side(z0, v0.anchor.side);
  const Index n = v.time;
  Point h = shift(bracket(shift(z, n), shift(v.anchor.first, n)), -n);
  return to_side(h, v0.anchor.side);
}

GroupoidElement base_set_element(const BaseSet& v, const Point& z) {
  return {holonomy_apply(v, z), z, v.anchor.side};
}

bool base_set_membership(const BaseSet& v, const GroupoidElement& b) {
  if (b.side != v.anchor.side || !in_holonomy_domain(v, b.second)) return false;
  return holonomy_apply(v, b.second) == b.first;
}

KDist groupoid_distance(const GroupoidElement& a, const GroupoidElement& b) { return distance_with_window(a, b, 0); }

KDist groupoid_distance_strict(const GroupoidElement& a, const GroupoidElement& b) {
  return distance_with_window(a, b, 1);
}

double groupoid_metric(const GroupoidElement& a, const GroupoidElement& b, const MetricParams& p) {
  validate_params(p);
  return groupoid_distance(a, b).value(p.kappa);
}

KDist units_distance(const Point& x, const Point& y, Side side) {
  if (x == y) return KDist::zero();
  bool close = side == Side::Stable ? agree_upto(x, y, 0) : agree_from(x, y, 0);
  return close ? point_distance(x, y) : KDist::one();
}

GroupoidElement phi_auto(const GroupoidElement& a, Index k) { return {shift(a.first, k), shift(a.second, k), a.side}; }

GroupoidElement inverse(const GroupoidElement& a) { return {a.second, a.first, a.side}; }

GroupoidElement compose(const GroupoidElement& a, const GroupoidElement& b) {
  if (a.side != b.side) throw Error(Errc::NotComposable, "elements live on different groupoids");
  if (a.second != b.first) throw Error(Errc::NotComposable, "source of the left factor differs from range of the right");
  return {a.first, b.second, a.side};
}

std::vector<GroupoidElement> enumerate_stable_elements(const TransitionMatrix& m, const PeriodicOrbit& p,
                                                       const PeriodicOrbit& q, int core_bound) {
  auto pts = enumerate_homoclinic(m, p, q, core_bound);
  std::vector<GroupoidElement> out;
  for (const Point& x : pts)
    for (const Point& y : pts)
      if (last_disagreement(x, y) != kPosInf) out.push_back({x, y, Side::Stable});
  return out;
}

}  // namespace tmc
