#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "tmclab/sft.hpp"

using namespace tmc;

namespace {

const TransitionMatrix kFull({{1, 1}, {1, 1}});
const TransitionMatrix kGolden({{1, 1}, {1, 0}});

Point zeros() { return Point::periodic({0}); }
Point ones() { return Point::periodic({1}); }
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

std::vector<Point> sample_points() {
  PeriodicOrbit p({1}, kFull), q({0}, kFull);
  auto pts = enumerate_homoclinic(kFull, p, q, 3);
  pts.push_back(zeros());
  pts.push_back(ones());
  pts.push_back(spike(2));
  pts.push_back(spike(-2));
  pts.push_back(Point::make({0, 1}, {1, 1}, {0}, -1));
  return pts;
}

}  // namespace

TEST(ValidateMatrix, Examples) {
  EXPECT_NO_THROW(validate_matrix(kFull));
  EXPECT_NO_THROW(validate_matrix(kGolden));
  EXPECT_EQ(code_of([] { validate_matrix(TransitionMatrix({{1, 0}, {0, 1}})); }), Errc::NotIrreducible);
  EXPECT_EQ(code_of([] { validate_matrix(TransitionMatrix({{1, 0}, {1, 0}})); }), Errc::ZeroRowOrColumn);
  EXPECT_EQ(code_of([] { TransitionMatrix({{1, 2}, {1, 0}}); }), Errc::InvalidInput);
}

TEST(SymbolAt, Examples) {
  EXPECT_EQ(zeros().at(1000000), 0);
  EXPECT_EQ(spike(3).at(3), 1);
  EXPECT_EQ(spike(3).at(2), 0);
  Point g = Point::make({0}, {1}, {1, 0}, 0);  // ...0001 1010...
  const int expect[] = {1, 1, 0, 1, 0, 1};
  for (int i = 0; i < 6; ++i) EXPECT_EQ(g.at(i), expect[i]) << i;
}

TEST(Canonical, UniqueRepresentatives) {
  EXPECT_EQ(Point::make({0, 0}, {0, 0, 1}, {0}, 1), spike(3));
  EXPECT_EQ(Point::make({0, 1}, {}, {0, 1}, 1), Point::periodic({0, 1}, 1));
  EXPECT_EQ(Point::periodic({1, 0}, 0), Point::periodic({0, 1}, 1));
  EXPECT_TRUE(Point::periodic({1, 0}).is_periodic());
  Point a = Point::make({0}, {0, 0, 1, 1}, {1}, -4);
  EXPECT_TRUE(a.core().empty());
  EXPECT_EQ(a.start(), -2);
  for (const Point& x : sample_points()) EXPECT_EQ(Point::parse(x.str()), x) << x.str();
  EXPECT_EQ(spike(3).str(), "(0)*|1@3|(0)*");
  EXPECT_EQ(code_of([] { Point::parse("(0)*1@3|(0)*"); }), Errc::InvalidInput);
}

TEST(Shift, Examples) {
  Point x = spike(3);
  EXPECT_EQ(shift(x, 0), x);
  EXPECT_EQ(shift(shift(x, 5), -5), x);
  EXPECT_EQ(shift(x, 1), spike(2));
  for (const Point& y : sample_points())
    for (Index i = -6; i <= 6; ++i) EXPECT_EQ(shift(y, 2).at(i), y.at(i + 2));
}

TEST(Reverse, MirrorsCoordinates) {
  for (const Point& y : sample_points()) {
    Point r = reverse(y);
    for (Index i = -8; i <= 8; ++i) EXPECT_EQ(r.at(i), y.at(-i));
    EXPECT_EQ(reverse(r), y);
  }
}

TEST(AgreementRadius, Examples) {
  EXPECT_FALSE(agreement_radius(zeros(), zeros()).has_value());
  EXPECT_EQ(*agreement_radius(zeros(), spike(0)), 0);
  EXPECT_EQ(*agreement_radius(zeros(), spike(3)), 3);
  // brute-force coordinate comparison over |i| <= 10
  for (const Point& x : sample_points())
    for (const Point& y : sample_points()) {
      if (x == y) continue;
      Index n = 0;
      while (n <= 10 && x.at(n) == y.at(n) && x.at(-n) == y.at(-n)) ++n;
      if (n <= 10) EXPECT_EQ(*agreement_radius(x, y), n) << x.str() << " " << y.str();
    }
}

TEST(Metric, Examples) {
  MetricParams p;
  EXPECT_EQ(metric(zeros(), zeros(), p), 0.0);
  EXPECT_EQ(metric(zeros(), spike(0), p), 1.0);
  EXPECT_EQ(metric(zeros(), spike(3), p), 0.125);
  EXPECT_EQ(metric(zeros(), spike(-3), MetricParams{4.0}), 1.0 / 64.0);
}

TEST(Metric, Ultrametric) {
  auto pts = sample_points();
  for (const Point& x : pts)
    for (const Point& y : pts)
      for (const Point& z : pts)
        ASSERT_LE(point_distance(x, z), kmax(point_distance(x, y), point_distance(y, z)));
}

TEST(Bracket, Examples) {
  Point x = zeros();
  EXPECT_EQ(bracket(x, x), x);
  Point y = spike(-2);
  EXPECT_EQ(bracket(x, y), spike(-2));
  EXPECT_EQ(bracket(y, x), x);
  EXPECT_EQ(code_of([&] { bracket(x, spike(0)); }), Errc::BracketUndefined);
}

TEST(Bracket, Axioms) {
  auto pts = sample_points();
  auto close = [](const Point& a, const Point& b) { return a.at(0) == b.at(0); };
  for (const Point& x : pts)
    for (const Point& y : pts) {
      if (!close(x, y)) continue;
      Point xy = bracket(x, y);
      EXPECT_EQ(bracket(x, x), x);
      EXPECT_EQ(bracket(xy, x), x);
      EXPECT_EQ(bracket(x, xy), xy);
      EXPECT_TRUE(is_allowed(xy, kGolden) || !is_allowed(x, kGolden) || !is_allowed(y, kGolden));
      if (x.at(1) == y.at(1)) EXPECT_EQ(bracket(shift(x, 1), shift(y, 1)), shift(xy, 1));
      for (const Point& z : pts) {
        if (!close(x, z) || !close(y, z)) continue;
        EXPECT_EQ(bracket(xy, z), bracket(x, z));
        EXPECT_EQ(bracket(x, bracket(y, z)), bracket(x, z));
      }
    }
}

TEST(LocalSets, Examples) {
  Point x = zeros(), y = spike(-2);
  for (Index e = 1; e <= 8; ++e) {
    EXPECT_TRUE(local_set_membership(x, x, e, Side::Stable));
    EXPECT_TRUE(local_set_membership(x, x, e, Side::Unstable));
  }
  EXPECT_TRUE(local_set_membership(x, y, 1, Side::Stable));
  EXPECT_FALSE(local_set_membership(x, y, 1, Side::Unstable));
}

TEST(LocalSets, ClosedFormsMatchDefinition) {
  auto pts = sample_points();
  for (const Point& x : pts)
    for (const Point& y : pts)
      for (Index e = 1; e <= 8; ++e) {
        ASSERT_EQ(in_local_stable(x, y, e), local_set_membership(x, y, e, Side::Stable)) << x.str() << y.str() << e;
        ASSERT_EQ(in_local_unstable(x, y, e), local_set_membership(x, y, e, Side::Unstable));
      }
}

TEST(LocalSets, ContractionWithEquality) {
  auto pts = sample_points();
  for (const Point& x : pts)
    for (const Point& y : pts)
      for (const Point& z : pts) {
        if (in_local_stable(x, y, 1) && in_local_stable(x, z, 1) && y != z)
          EXPECT_EQ(point_distance(shift(y, 1), shift(z, 1)).exp, point_distance(y, z).exp + 1);
        if (in_local_unstable(x, y, 1) && in_local_unstable(x, z, 1) && y != z)
          EXPECT_EQ(point_distance(shift(y, -1), shift(z, -1)).exp, point_distance(y, z).exp + 1);
      }
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(entropy(kFull), std::log(2.0), 1e-12);
  EXPECT_NEAR(entropy(kGolden), std::log((1 + std::sqrt(5.0)) / 2), 1e-12);
  EXPECT_NEAR(entropy(kGolden), 0.481212, 1e-6);
  EXPECT_EQ(entropy(TransitionMatrix(std::vector<std::vector<int>>{{1}})), 0.0);
  // periodic irreducible chain: a 3-cycle has spectral radius 1
  EXPECT_NEAR(entropy(TransitionMatrix({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}})), 0.0, 1e-12);
}

TEST(Entropy, PermutationInvariant) {
  TransitionMatrix m({{1, 1, 0}, {0, 0, 1}, {1, 1, 1}});
  double h = entropy(m);
  for (std::vector<int> perm : {std::vector<int>{1, 2, 0}, {2, 0, 1}, {0, 2, 1}})
    EXPECT_NEAR(entropy(m.permuted(perm)), h, 1e-12);
}

TEST(HausdorffDimension, Examples) {
  EXPECT_NEAR(hausdorff_dimension(kFull, {2.0}), 2.0, 1e-12);
  EXPECT_NEAR(hausdorff_dimension(kFull, {4.0}), 1.0, 1e-12);
  EXPECT_EQ(hausdorff_dimension(TransitionMatrix(std::vector<std::vector<int>>{{1}}), {3.0}), 0.0);
  EXPECT_EQ(code_of([] { hausdorff_dimension(kFull, {1.0}); }), Errc::InvalidInput);
}

namespace {

// Distinct sequences 0^inf w 1^inf (w on [-L, L]) whose minimal core fits the window.
std::size_t step_oracle(int L) {
  std::set<std::vector<int>> seen;
  const int width = 2 * L + 1;
  for (int mask = 0; mask < (1 << width); ++mask) {
    auto x = [&](int i) { return i < -L ? 0 : i > L ? 1 : (mask >> (i + L)) & 1; };
    int a = -L - 1;
    while (x(a) == 0) ++a;
    int b = L + 1;
    while (x(b - 1) == 1) --b;
    int start = a >= b ? b : a, end = a >= b ? b : b;
    if (end - start > L || start < -L || end > L) continue;
    std::vector<int> key;
    for (int i = -L - 1; i <= L + 1; ++i) key.push_back(x(i));
    seen.insert(key);
  }
  return seen.size();
}

}  // namespace

TEST(Homoclinic, Examples) {
  PeriodicOrbit p({1}, kFull), q({0}, kFull);
  auto l0 = enumerate_homoclinic(kFull, p, q, 0);
  ASSERT_EQ(l0.size(), 1u);
  EXPECT_EQ(l0[0].str(), "(0)*|@0|(1)*");
  for (int L = 0; L <= 5; ++L) EXPECT_EQ(enumerate_homoclinic(kFull, p, q, L).size(), step_oracle(L)) << L;
  EXPECT_EQ(code_of([&] { enumerate_homoclinic(kFull, p, p, 0); }), Errc::OrbitsNotDisjoint);
}

TEST(Homoclinic, MonotoneSortedAllowed) {
  PeriodicOrbit p({0, 1}, kGolden), q({0}, kGolden);
  std::vector<Point> prev;
  for (int L = 0; L <= 5; ++L) {
    auto cur = enumerate_homoclinic(kGolden, p, q, L);
    std::set<std::string> keys;
    for (const Point& x : cur) {
      EXPECT_TRUE(is_allowed(x, kGolden));
      keys.insert(x.str());
    }
    EXPECT_EQ(keys.size(), cur.size());
    for (std::size_t i = 1; i < cur.size(); ++i) EXPECT_LT(cur[i - 1].str(), cur[i].str());
    for (const Point& x : prev) EXPECT_TRUE(keys.count(x.str()));
    prev = cur;
  }
}

TEST(Cylinder, MatchesFilteredHomoclinicSet) {
  PeriodicOrbit p({1}, kFull), q({0}, kFull);
  auto all = enumerate_homoclinic(kFull, p, q, 6);
  Point past = Point::make({0}, {1}, {1}, -1), future = Point::make({0}, {0}, {1}, 2);
  auto cyl = enumerate_cylinder(kFull, past, -1, future, 3, 1000);
  std::set<std::string> got;
  for (const Point& x : cyl) got.insert(x.str());
  std::set<std::string> want;
  for (const Point& x : all)
    if (agree_upto(x, past, -1) && agree_from(x, future, 3)) want.insert(x.str());
  EXPECT_EQ(got, want);
  EXPECT_EQ(cyl.size(), 8u);
  EXPECT_EQ(code_of([&] { enumerate_cylinder(kFull, past, -1, future, 3, 4); }), Errc::BasisCapExceeded);
  // golden mean forbids 11, so adjacent ones are never produced
  auto g = enumerate_cylinder(kGolden, zeros(), 0, zeros(), 5, 1000);
  EXPECT_EQ(g.size(), 8u);  // independent sets on a path of 4 vertices
}

TEST(Signatures, EqualIffSamePast) {
  auto pts = sample_points();
  for (const Point& x : pts)
    for (const Point& y : pts)
      for (Index k = -3; k <= 3; ++k) {
        EXPECT_EQ(past_signature(x, k) == past_signature(y, k), agree_upto(x, y, k));
        EXPECT_EQ(future_signature(x, k) == future_signature(y, k), agree_from(x, y, k));
      }
}

TEST(Bridges, CountsMatchEnumeration) {
  const TransitionMatrix full({{1, 1}, {1, 1}}), golden({{1, 1}, {1, 0}});
  for (const auto* m : {&full, &golden})
    for (Symbol a = 0; a < 2; ++a)
      for (Symbol b = 0; b < 2; ++b)
        for (Index len = 0; len <= 9; ++len) {
          auto words = bridge_words(*m, a, len, b, 1u << 12);
          ASSERT_EQ(words.size(), count_bridge_words(*m, a, len, b));
          for (const Word& w : words) {
            Word all{a};
            all.insert(all.end(), w.begin(), w.end());
            all.push_back(b);
            for (std::size_t i = 1; i < all.size(); ++i) ASSERT_TRUE(m->allowed(all[i - 1], all[i]));
          }
        }
  EXPECT_EQ(count_bridge_words(full, 0, 10, 1), 1u << 10);
  EXPECT_EQ(count_words(golden, 0, 1, 0), 1u);
  EXPECT_EQ(count_words(golden, 1, 2, 1), 0u);
  EXPECT_EQ(count_words(golden, 0, 5, 0), 5u);  // Fibonacci
  EXPECT_THROW(count_bridge_words(full, 0, 70, 0), Error);
}

TEST(Bridges, PinnedCylinderIsAFilter) {
  const TransitionMatrix golden({{1, 1}, {1, 0}});
  Point past = Point::periodic({0}), future = Point::periodic({0, 1});
  auto all = enumerate_cylinder(golden, past, -1, future, 9, 1u << 12);
  const Word pin{1, 0};
  auto pinned = enumerate_pinned_cylinder(golden, past, -1, future, 9, pin, 3, 1u << 12);
  std::vector<Point> filtered;
  for (const Point& x : all)
    if (x.at(3) == 1 && x.at(4) == 0) filtered.push_back(x);
  std::sort(pinned.begin(), pinned.end());
  std::sort(filtered.begin(), filtered.end());
  EXPECT_EQ(pinned, filtered);
  EXPECT_FALSE(pinned.empty());
  EXPECT_THROW(enumerate_pinned_cylinder(golden, past, 3, future, 9, pin, 3, 100), Error);
}

TEST(Bridges, FirstWordIsLeast) {
  const TransitionMatrix golden({{1, 1}, {1, 0}});
  for (Symbol a = 0; a < 2; ++a)
    for (Symbol b = 0; b < 2; ++b)
      for (Index len = 0; len <= 8; ++len) {
        auto all = bridge_words(golden, a, len, b, 1000);
        auto first = first_bridge_word(golden, a, len, b);
        ASSERT_EQ(first.has_value(), !all.empty());
        if (first) EXPECT_EQ(*first, *std::min_element(all.begin(), all.end()));
      }
}
