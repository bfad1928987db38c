#include <gtest/gtest.h>

#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "tmclab/auf.hpp"

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

std::vector<GroupoidElement> sample_elements(const TransitionMatrix& m, const Word& p, const Word& q, int core_bound,
                                             std::size_t count, std::uint64_t seed) {
  auto all = enumerate_stable_elements(m, PeriodicOrbit(p, m), PeriodicOrbit(q, m), core_bound);
  std::mt19937_64 rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  if (all.size() > count) all.resize(count);
  return all;
}

QuasimetricTable table(const std::vector<std::vector<double>>& v) {
  QuasimetricTable t;
  for (std::size_t i = 0; i < v.size(); ++i) {
    t.ids.push_back("p" + std::to_string(i));
    t.values.insert(t.values.end(), v[i].begin(), v[i].end());
  }
  return t;
}

}  // namespace

TEST(CoverIndex, Examples) {
  EXPECT_EQ(cover_params(2.0).ceil_log3, 2);
  EXPECT_EQ(cover_params(3.0).ceil_log3, 1);
  EXPECT_EQ(cover_params(1.5).ceil_log3, 3);
  EXPECT_EQ(code_of([] { cover_params(1.0); }), Errc::InvalidInput);
  auto cp = cover_params(2.0);
  EXPECT_EQ(j_index(0, 0, cp), 2);
  EXPECT_EQ(j_index(7, 3, cp), 9);
  EXPECT_EQ(k_index(1, 3, cp), 5);
  EXPECT_EQ(k_index(9, 1, cp), 1);
  EXPECT_EQ(code_of([&] { k_index(1, 0, cp); }), Errc::InvalidInput);
}

TEST(CoverIndex, Identities) {
  for (double lambda : {1.5, 2.0, 3.0, 5.0}) {
    auto cp = cover_params(lambda);
    for (Index na = 0; na <= 10; ++na) {
      const Index na1 = std::max<Index>(na, 1);
      for (Index n = 0; n <= 10; ++n) EXPECT_GE(j_index(na, n, cp), std::max(na, n) + 1);
      for (Index n = 1; n <= 10; ++n) {
        EXPECT_EQ(j_index(na, k_index(na1, n, cp), cp), k_index(na1, n + 1, cp));
        if (n >= 2) EXPECT_EQ(k_index(na1, n + 1, cp) - k_index(na1, n, cp), cp.ceil_log3);
      }
    }
  }
}

TEST(SftCovers, Constants) {
  SftCoverSystem s2(2.0), s4(4.0);
  EXPECT_EQ(s2.stable_exp(), 3);
  EXPECT_EQ(s2.eta_exp(0), 4);
  EXPECT_EQ(s4.stable_exp(), 2);  // d < 1/32 means d <= 4^-3, the same strict ball as radius 4^-2
  EXPECT_EQ(s4.eta_exp(0), 3);    // 4^-2/4 = 4^-3
  EXPECT_EQ(s2.n_a({zeros(), spike(3)}), 7);
  EXPECT_EQ(code_of([&] { s2.n_a({zeros(), spike(-3), Side::Unstable}); }), Errc::SideMismatch);
}

TEST(SftCovers, FirstTimeMatchesBruteForce) {
  for (double lambda : {2.0, 4.0}) {
    SftCoverSystem sys(lambda);
    for (const auto& a : sample_elements(kFull, {1}, {0}, 3, 400, 1)) ASSERT_EQ(sys.n_a(a), sys.n_a_bruteforce(a)) << a;
  }
}

TEST(SftCovers, MembershipClosedFormMatchesDefinition) {
  SftCoverSystem sys;
  CoverSample cs(sys, sample_elements(kFull, {1}, {0}, 3, 80, 2));
  const auto& els = cs.elements();
  for (std::size_t c = 0; c < els.size(); ++c)
    for (Index n = 0; n <= 6; ++n) {
      BaseSet v = sys.v_set(els[c], n);
      for (std::size_t e = 0; e < els.size(); ++e) {
        ASSERT_EQ(cs.in_v(e, c, n), base_set_membership(v, els[e])) << els[c] << " " << els[e] << " n=" << n;
        ASSERT_EQ(cs.in_u(e, c, n), sys.u_member(els[e], els[c], n));
      }
    }
}

TEST(SftCovers, NeighbourhoodBase) {
  SftCoverSystem sys;
  auto els = sample_elements(kGolden, {0, 1}, {0}, 4, 60, 3);
  for (const auto& a : els)
    for (Index n = 0; n <= 8; ++n) {
      EXPECT_TRUE(sys.u_member(a, a, n));
      for (const auto& b : els)
        if (sys.u_member(b, a, n + 1)) EXPECT_TRUE(sys.u_member(b, a, n));
    }
}

TEST(Rho, Examples) {
  SftCoverSystem sys;
  CoverSample cs(sys, sample_elements(kFull, {1}, {0}, 3, 60, 4));
  const std::size_t s = cs.elements().size();
  std::vector<std::size_t> all(s), few{0, 1, 2};
  std::iota(all.begin(), all.end(), 0);
  bool saw_one = false;
  for (std::size_t a = 0; a < s; ++a) {
    EXPECT_EQ(cs.rho(a, a, all), 0.0);
    for (std::size_t b = 0; b < s; ++b) {
      EXPECT_GE(cs.rho(a, b, few), cs.rho(a, b, all));
      double r = cs.rho(a, b, all);
      bool shared = false;
      for (std::size_t c = 0; c < s; ++c) shared = shared || (cs.in_u(a, c, 1) && cs.in_u(b, c, 1));
      if (!shared && a != b) {
        EXPECT_EQ(r, 1.0);
        saw_one = true;
      }
    }
  }
  EXPECT_TRUE(saw_one);
  validate_table(cs.rho_table());
}

TEST(ChainMetric, Examples) {
  auto d1 = chain_metric(table({{0, 0.5, 1}, {0.5, 0, 0.5}, {1, 0.5, 0}}));
  EXPECT_EQ(d1.at(0, 2), 1.0);
  auto d2 = chain_metric(table({{0, 0.25, 1}, {0.25, 0, 0.25}, {1, 0.25, 0}}));
  EXPECT_EQ(d2.at(0, 2), 0.5);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(d2.at(i, i), 0.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(d2.at(i, j), d2.at(j, i));
  }
}

TEST(Sandwich, CoverDerivedTableHolds) {
  SftCoverSystem sys;
  CoverSample cs(sys, sample_elements(kFull, {1}, {0}, 3, 200, 5));
  ASSERT_EQ(cs.elements().size(), 200u);
  auto rho = cs.rho_table();
  auto d = chain_metric(rho);
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j) ASSERT_LE(d.at(i, j), rho.at(i, j));
  auto rep = sandwich_check(rho, d);
  EXPECT_EQ(rep.checked, 200u * 199u / 2);
  EXPECT_TRUE(rep.ok()) << rep.first_counterexample;
}

TEST(Sandwich, AdversarialAndTrivialTables) {
  const double q = 1.0 / 16;
  auto bad = table({{0, q, 1, 1}, {q, 0, q, 1}, {1, q, 0, q}, {1, 1, q, 0}});
  auto rep = sandwich_check(bad, chain_metric(bad));
  EXPECT_FALSE(rep.ok());
  EXPECT_EQ(rep.first_counterexample, "p0,p2: rho=1 D=0.125");
  auto one = table({{0}});
  EXPECT_TRUE(sandwich_check(one, chain_metric(one)).ok());
}

TEST(TableCsv, RoundTrip) {
  auto t = table({{0, 0.5, 1}, {0.5, 0, 0.125}, {1, 0.125, 0}});
  std::ostringstream os;
  write_table_csv(os, t);
  EXPECT_EQ(os.str(), "id,p0,p1,p2\np0,0,2^-1,1\np1,2^-1,0,2^-3\np2,1,2^-3,0\n");
  std::istringstream is(os.str());
  auto back = read_table_csv(is);
  EXPECT_EQ(back.ids, t.ids);
  EXPECT_EQ(back.values, t.values);
  validate_table(back);
  auto asym = table({{0, 0.5}, {0.25, 0}});
  EXPECT_EQ(code_of([&] { validate_table(asym); }), Errc::InvalidInput);
  auto notpow = table({{0, 0.3}, {0.3, 0}});
  EXPECT_EQ(code_of([&] { validate_table(notpow); }), Errc::InvalidInput);
  std::istringstream junk("id,a\na,x\n");
  EXPECT_EQ(code_of([&] { read_table_csv(junk); }), Errc::InvalidInput);
}

TEST(Star, HoldsOnSampledTriples) {
  SftCoverSystem sys;
  CoverSample cs(sys, sample_elements(kFull, {1}, {0}, 3, 150, 6));
  auto rep = star_check(cs, 6, 0, 11);
  EXPECT_GE(rep.checked, 1000u);
  EXPECT_TRUE(rep.ok()) << rep.first_counterexample;
  CoverSample cg(sys, sample_elements(kGolden, {0, 1}, {0}, 5, 150, 6));
  auto rg = star_check(cg, 6, 0, 11);
  EXPECT_GE(rg.checked, 1000u);
  EXPECT_TRUE(rg.ok()) << rg.first_counterexample;
}

TEST(Diameter, RegressionBase) {
  SftCoverSystem sys;
  std::vector<GroupoidElement> centers{{zeros(), spike(3)}, unit(spike(-1)),
                                       {Point::make({0}, {1, 1}, {0}, 0), Point::make({0}, {1, 1}, {0}, 0)}};
  auto rep = diameter_bound_check(sys, kFull, centers, 12, 3);
  EXPECT_NEAR(rep.predicted_base, std::sqrt(0.5), 1e-15);
  EXPECT_TRUE(rep.within_tolerance) << "base " << rep.base << " slope " << rep.slope;
  for (std::size_t i = 0; i < rep.ks.size(); ++i)
    EXPECT_LE(rep.max_d[i], rep.gamma_prime * std::pow(rep.predicted_base, static_cast<double>(rep.ks[i])) * (1 + 1e-12));
}
