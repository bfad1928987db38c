#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "tmclab/groupoid.hpp"

using namespace tmc;

namespace {

const TransitionMatrix kFull({{1, 1}, {1, 1}});
const TransitionMatrix kGolden({{1, 1}, {1, 0}});

Point zeros() { return Point::periodic({0}); }
Point spike(Index k) { return Point::make({0}, {1}, {0}, k); }

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::InvalidInput;
}

const std::vector<GroupoidElement>& full_elements() {
  static const auto v = enumerate_stable_elements(kFull, PeriodicOrbit({1}, kFull), PeriodicOrbit({0}, kFull), 3);
  return v;
}

const std::vector<GroupoidElement>& golden_elements() {
  static const auto v =
      enumerate_stable_elements(kGolden, PeriodicOrbit({0, 1}, kGolden), PeriodicOrbit({0}, kGolden), 4);
  return v;
}

template <class F>
void for_sampled_triples(const std::vector<GroupoidElement>& els, int count, F f) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, els.size() - 1);
  for (int i = 0; i < count; ++i) f(els[pick(rng)], els[pick(rng)], els[pick(rng)]);
}

}  // namespace

TEST(CS, Examples) {
  EXPECT_EQ(c_s(unit(zeros())), 0);
  EXPECT_EQ(c_s({zeros(), spike(3)}), 5);
  EXPECT_EQ(c_s_bruteforce({zeros(), spike(3)}), 5);
  // mirror: unstable side with the spike at -3
  EXPECT_EQ(c_s({zeros(), spike(-3), Side::Unstable}), 5);
  EXPECT_EQ(c_s_bruteforce({zeros(), spike(-3), Side::Unstable}), 5);
  EXPECT_EQ(c_s({zeros(), spike(-7)}), 0);
  EXPECT_EQ(code_of([] { c_s({zeros(), Point::periodic({1})}); }), Errc::InvalidInput);
}

TEST(CS, ClosedFormMatchesBruteForce) {
  for (const auto* els : {&full_elements(), &golden_elements()})
    for (const GroupoidElement& a : *els) {
      ASSERT_EQ(c_s(a), c_s_bruteforce(a)) << a;
      ASSERT_EQ(c_s(time_reverse(a)), c_s_bruteforce(time_reverse(a)));
    }
}

TEST(CS, ShiftsUnderPhiInverse) {
  for (const GroupoidElement& a : full_elements()) {
    Index c = c_s(a);
    if (c >= 1) EXPECT_EQ(c_s(phi_auto(a, -1)), c + 1) << a;
    EXPECT_LE(c_s(phi_auto(a, -1)), c + 1);
  }
}

TEST(Elements, Validity) {
  PeriodicOrbit p({1}, kFull), q({0}, kFull);
  for (const GroupoidElement& a : full_elements()) {
    EXPECT_TRUE(is_valid_element(a, p, q));
    EXPECT_TRUE(is_valid_element(time_reverse(a), q, p));
  }
  EXPECT_FALSE(is_valid_element({zeros(), Point::periodic({1})}, p, q));
}

TEST(Holonomy, Examples) {
  for (const GroupoidElement& c : full_elements()) {
    Index cs = c_s(c);
    for (Index n = cs; n <= cs + 2; ++n) {
      BaseSet v = make_base_set(c, n, cs);
      EXPECT_EQ(holonomy_apply(v, c.second), c.first);
      EXPECT_TRUE(base_set_membership(v, c));
    }
  }
  BaseSet v = make_base_set({zeros(), spike(3)}, 6, 5);
  EXPECT_EQ(code_of([&] { holonomy_apply(v, spike(8)); }), Errc::OutsideDomain);
  EXPECT_EQ(code_of([&] { holonomy_apply(v, Point::make({0}, {1, 0, 0, 1}, {0}, 3)); }), Errc::OutsideDomain);
  EXPECT_EQ(holonomy_apply(v, Point::make({0}, {1, 0, 0, 0, 0, 1}, {0}, 3)), spike(8));
  EXPECT_EQ(code_of([] { make_base_set({zeros(), spike(3)}, 6, 4); }), Errc::InvalidInput);
  EXPECT_EQ(code_of([] { make_base_set({zeros(), spike(3)}, 4, 5); }), Errc::InvalidInput);
}

TEST(Holonomy, IsometricAndValid) {
  PeriodicOrbit p({1}, kFull), q({0}, kFull);
  auto pts = enumerate_homoclinic(kFull, p, q, 4);
  for (const GroupoidElement& c : full_elements()) {
    Index cs = c_s(c);
    BaseSet v = make_base_set(c, cs + 1, cs);
    std::vector<Point> dom;
    for (const Point& z : pts)
      if (in_holonomy_domain(v, z)) dom.push_back(z);
    for (const Point& z : dom) {
      GroupoidElement e = base_set_element(v, z);
      EXPECT_TRUE(is_valid_element(e, p, q));
      EXPECT_TRUE(base_set_membership(v, e));
      for (const Point& w : dom) EXPECT_EQ(point_distance(holonomy_apply(v, z), holonomy_apply(v, w)), point_distance(z, w));
    }
  }
}

TEST(Holonomy, UnstableMirror) {
  GroupoidElement c{zeros(), spike(-3), Side::Unstable};
  BaseSet v = make_base_set(c, 6, 5);
  EXPECT_EQ(holonomy_apply(v, spike(-3)), zeros());
  EXPECT_EQ(holonomy_apply(v, Point::make({0}, {1, 0, 0, 0, 0, 1}, {0}, -8)), spike(-8));
  EXPECT_EQ(code_of([&] { holonomy_apply(v, Point::make({0}, {1, 0, 0, 1}, {0}, -6)); }), Errc::OutsideDomain);
}

TEST(BaseSets, MembershipPreservesCS) {
  const auto& els = full_elements();
  for (std::size_t i = 0; i < els.size(); i += 7) {
    const GroupoidElement& a = els[i];
    Index cs = c_s(a);
    for (Index n = cs; n <= cs + 2; ++n) {
      BaseSet v = make_base_set(a, n, n);
      for (const GroupoidElement& b : els) {
        if (base_set_membership(v, b)) EXPECT_EQ(c_s(b), cs);
        if (c_s(b) != cs) EXPECT_FALSE(base_set_membership(v, b));
      }
    }
  }
}

TEST(GroupoidMetric, Examples) {
  MetricParams p;
  GroupoidElement a = unit(zeros()), b = unit(spike(3));
  EXPECT_EQ(groupoid_metric(a, a, p), 0.0);
  EXPECT_EQ(groupoid_metric(a, b, p), 0.125);
  EXPECT_EQ(groupoid_metric(a, {zeros(), spike(3)}, p), 1.0);
  EXPECT_EQ(code_of([&] { groupoid_distance(a, unit(zeros(), Side::Unstable)); }), Errc::SideMismatch);
}

TEST(GroupoidMetric, Ultrametric) {
  for (const auto* els : {&full_elements(), &golden_elements()})
    for_sampled_triples(*els, 60000, [](const auto& a, const auto& b, const auto& c) {
      ASSERT_LE(groupoid_distance(a, c), kmax(groupoid_distance(a, b), groupoid_distance(b, c))) << a << b << c;
      ASSERT_EQ(groupoid_distance(a, b), groupoid_distance(b, a));
    });
}

TEST(GroupoidMetric, PhiInverseLipschitz) {
  for (const auto* els : {&full_elements(), &golden_elements()})
    for_sampled_triples(*els, 40000, [](const auto& a, const auto& b, const auto&) {
      KDist d = groupoid_distance(a, b), d1 = groupoid_distance(phi_auto(a, -1), phi_auto(b, -1));
      ASSERT_LE(d1, d) << a << b;
      if (d.is_zero()) return;
      ASSERT_LE(d1.exp, d.exp + 1) << a << b;  // kappa^{-1} D <= D(Phi^{-1})
      if (d.exp >= 1) ASSERT_EQ(d1.exp, d.exp + 1) << a << b;
    });
}

TEST(GroupoidMetric, StrictLocalSetsBreakLowerBound) {
  Point x = zeros(), y = spike(1);
  GroupoidElement a = unit(x), b = unit(y);
  EXPECT_EQ(groupoid_distance_strict(a, b), KDist::one());
  EXPECT_EQ(groupoid_distance_strict(phi_auto(a, -1), phi_auto(b, -1)), KDist::pow(2));
  EXPECT_EQ(groupoid_distance(a, b), KDist::pow(1));
  EXPECT_EQ(groupoid_distance(phi_auto(a, -1), phi_auto(b, -1)), KDist::pow(2));
}

TEST(GroupoidMetric, InverseIsometric) {
  for_sampled_triples(full_elements(), 20000, [](const auto& a, const auto& b, const auto&) {
    ASSERT_EQ(groupoid_distance(inverse(a), inverse(b)), groupoid_distance(a, b));
  });
}

TEST(GroupoidMetric, UnitsPullBack) {
  PeriodicOrbit p({1}, kFull), q({0}, kFull);
  auto pts = enumerate_homoclinic(kFull, p, q, 3);
  for (const Point& x : pts)
    for (const Point& y : pts) EXPECT_EQ(groupoid_distance(unit(x), unit(y)), units_distance(x, y));
}

TEST(GroupoidMetric, BaseSetsAgainstBallsAndSource) {
  const auto& els = full_elements();
  for (std::size_t i = 0; i < els.size(); i += 5) {
    const GroupoidElement& c = els[i];
    Index cs = c_s(c);
    for (Index n = cs; n <= cs + 2; ++n) {
      BaseSet v = make_base_set(c, n, n);
      BaseSet w = make_base_set(c, n, cs);
      std::vector<GroupoidElement> members;
      for (const GroupoidElement& b : els) {
        // open ball of radius kappa^{-n-1} sits inside the base set
        if (groupoid_distance(c, b) < KDist::pow(n + 1)) EXPECT_TRUE(base_set_membership(w, b)) << c << b;
        if (base_set_membership(v, b)) members.push_back(b);
      }
      for (const auto& a : members)
        for (const auto& b : members) {
          EXPECT_LE(groupoid_distance(a, b), KDist::pow(n + 1));
          EXPECT_EQ(groupoid_distance(a, b), units_distance(source(a), source(b)));
          EXPECT_EQ(groupoid_distance(a, b), units_distance(range(a), range(b)));
        }
    }
  }
}

TEST(GroupoidAlgebra, Laws) {
  GroupoidElement a{zeros(), spike(3)}, b{spike(3), spike(5)};
  EXPECT_EQ(compose(a, inverse(a)), unit(zeros()));
  EXPECT_EQ(compose(a, b), (GroupoidElement{zeros(), spike(5)}));
  EXPECT_EQ(code_of([&] { compose(b, a); }), Errc::NotComposable);
  EXPECT_EQ(phi_auto(a, 0), a);
  EXPECT_EQ(phi_auto(phi_auto(a, 3), -3), a);
  EXPECT_EQ(time_reverse(time_reverse(a)), a);
}
