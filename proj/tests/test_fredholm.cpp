#include <gtest/gtest.h>

#include <random>

#include "tmclab/calculus.hpp"
#include "tmclab/errors.hpp"
#include "tmclab/fredholm.hpp"

using namespace tmc;

namespace {

const TransitionMatrix kFull({{1, 1}, {1, 1}});
const TransitionMatrix kGolden({{1, 1}, {1, 0}});
const Point kStep = Point::parse("(0)*|@0|(1)*");

Function reference_a(Index j_max) {
  return {Side::Stable, {Term{make_bisection(unit(kStep), 0, 0), Weight{1.0, SeriesWeight{0, 2, j_max, 0.5, 1.0}}}}};
}

Function reference_b() {
  const GroupoidElement e{kStep, Point::parse("(0)*|@1|(1)*"), Side::Unstable};
  return indicator(make_base_set(e, c_s(e), c_s(e)), 2.0);
}

// Diagonal 0/1 function: the indicator of a unit bisection around the step point.
Function unit_projection(Index radius) {
  return {Side::Stable, {Term{make_bisection(unit(kStep), radius, 0), Weight{1.0, {}}}}};
}

Function golden_b() {
  const Point x = Point::parse("(0)*|@0|(0)*"), y = Point::parse("(0)*|10@-1|(0)*");
  const GroupoidElement g{x, y, Side::Unstable};
  return indicator(make_base_set(g, c_s(g), c_s(g)), Complex(1.0, -1.0));
}

Function golden_a() {
  const Point x = Point::parse("(0)*|@0|(0)*"), y = Point::parse("(0)*|01@0|(0)*");
  const GroupoidElement g{y, x, Side::Stable};
  return indicator(make_base_set(g, c_s(g) + 1, c_s(g)), 1.5);
}

double max_abs(const Eigen::MatrixXcd& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

Eigen::MatrixXcd random_matrix(Eigen::Index d, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  return a;
}

Eigen::MatrixXcd random_unitary(Eigen::Index d, std::mt19937& rng) {
  return Eigen::HouseholderQR<Eigen::MatrixXcd>(random_matrix(d, rng)).householderQ();
}

}  // namespace

TEST(Inflated, UnstableBlockIsGTimesShift) {
  const Function g = reference_b();
  for (Index jp : {-2, -1, 1, 2}) {
    BasisRegistry basis;
    for (Index k = -3; k <= 3; ++k) basis.insert(shift(kStep, k));
    const std::size_t n0 = basis.size();
    const InflatedOperator inf = inflate_unstable(g, jp, 0, 4, basis);
    // oracle: represent(g) after |jp| applications of u or u*
    SparseOperator u = identity_operator(n0);
    for (Index s = 0; s < std::abs(jp); ++s) {
      const std::size_t cols = basis.size();
      SparseOperator step;
      for (std::size_t x = 0; x < cols; ++x) step.add(basis.insert(shift(basis.point(x), jp > 0 ? 1 : -1)), x, 1.0);
      u = step * u;
    }
    const SparseOperator oracle = restrict_columns(represent(g, basis) * u, n0);
    for (Index m = 0; m <= 4; ++m) {
      const auto it = inf.blocks.find({m + jp, m});
      ASSERT_EQ(it != inf.blocks.end(), m + jp >= 0 && m + jp <= 4);
      if (it != inf.blocks.end()) EXPECT_EQ(max_abs_difference(it->second, oracle), 0.0) << "jp = " << jp;
    }
  }
}

TEST(Inflated, StableBlocksCarryAlpha) {
  const Function a = reference_a(8);
  BasisRegistry basis;
  for (Index k = -4; k <= 4; ++k) basis.insert(shift(kStep, k));
  const std::size_t n0 = basis.size();
  const InflatedOperator inf = inflate_stable(a, 2, -3, 3, basis);
  EXPECT_EQ(inf.blocks.size(), 5u);
  for (const auto& [rc, op] : inf.blocks) {
    EXPECT_EQ(rc.second, rc.first + 2);
    EXPECT_EQ(max_abs_difference(op, restrict_columns(represent(alpha(a, rc.first), basis), n0)), 0.0);
  }
  EXPECT_THROW(inflate_stable(reference_b(), 0, 0, 1, basis), Error);
  EXPECT_THROW(inflate_unstable(a, 0, 0, 1, basis), Error);
}

TEST(Kpw, SpectrumMatchesUntwistedCommutator) {
  const Function a = reference_a(12), b = reference_b();
  for (Index j = -2; j <= 2; ++j)
    for (Index jp = -2; jp <= 2; ++jp) {
      BasisRegistry basis(1u << 16);
      seed_kpw_basis(kFull, a, b, -4, 10, jp, basis);
      const KpwCommutator k = kpw_commutator(a, j, b, jp, -4, 10, basis);
      EXPECT_EQ(k.margin, std::max(std::abs(j), std::abs(jp)) + 1);
      EXPECT_EQ(k.rows.size() + k.excluded.size(), 15u);
      ASSERT_FALSE(k.spectrum.empty());
      EXPECT_LT(k.spectrum_gap, 1e-10) << "j = " << j << ", j' = " << jp;
      // rows of the untwisted commutator are the exact blocks R_n
      std::vector<BlockSpectrum> ref;
      for (Index n : k.rows) ref.push_back(block_spectrum(kFull, a, b, n));
      const auto x = k.reference.values(), y = merged_spectrum(ref).values();
      ASSERT_EQ(x.size(), y.size());
      for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], y[i], 1e-12);
    }
}

TEST(Kpw, GoldenMean) {
  const Function a = golden_a(), b = golden_b();
  for (auto [j, jp] : {std::pair<Index, Index>{1, -1}, {0, 2}, {-1, 1}}) {
    BasisRegistry basis(1u << 16);
    seed_kpw_basis(kGolden, a, b, -3, 8, jp, basis);
    const KpwCommutator k = kpw_commutator(a, j, b, jp, -3, 8, basis);
    ASSERT_FALSE(k.spectrum.empty());
    EXPECT_LT(k.spectrum_gap, 1e-10);
  }
}

TEST(Modules, OddModuleFromUnitProjection) {
  const Function e = unit_projection(2), b = reference_b();
  BasisRegistry basis(1u << 14);
  for (const Point& x : CommutatorAssembler(kFull, e, b).columns(basis.cap())) basis.insert(x);
  for (Index k = -3; k <= 3; ++k) basis.insert(shift(kStep, k));
  ASSERT_TRUE(close_basis({b, e}, basis));
  const Eigen::MatrixXcd pe = dense_representation(e, basis);
  const auto rep = [&basis](const Function& f) { return dense_representation(f, basis); };
  const FredholmModule mod = make_odd_module(pe, rep);
  const auto d = mod.dim();
  EXPECT_EQ(max_abs(mod.F * mod.F - Eigen::MatrixXcd::Identity(d, d)), 0.0);
  EXPECT_EQ(max_abs(mod.F.adjoint() - mod.F), 0.0);
  const SingularSpectrum r0 = block_spectrum(kFull, e, b, 0).spectrum;
  ASSERT_FALSE(r0.empty());
  for (const SummabilityRow& row : summability_report(mod, {{"b", b}}, {0.5, 1.0, 2.0})) {
    EXPECT_EQ(row.q1, 0.0);
    EXPECT_EQ(row.q2, 0.0);
    EXPECT_NEAR(row.q3, 2.0 * schatten_norm(r0, row.p), 1e-10);
    EXPECT_EQ(row.verdict, summability_verdict(r0.scaled(2.0), row.p).verdict);
  }
  EXPECT_THROW(make_odd_module(0.5 * Eigen::MatrixXcd::Identity(3, 3), rep), Error);
}

TEST(Modules, EvenModuleFromCornerPermutation) {
  const Eigen::Index d = 6;
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d, d), v = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index i : {1, 2, 4}) p(i, i) = 1.0;
  v(2, 1) = v(4, 2) = v(1, 4) = 1.0;  // 3-cycle on the corner
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(d, d);
  t(0, 1) = t(3, 4) = 2.0;
  const auto rep = [t](const Function&) { return t; };
  const FredholmModule mod = make_even_module(v, p, rep);
  ASSERT_EQ(mod.dim(), 2 * d);
  const Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(2 * d, 2 * d);
  EXPECT_EQ(max_abs(mod.F * mod.F - one), 0.0);
  EXPECT_EQ(max_abs(mod.F.adjoint() - mod.F), 0.0);
  const auto rows = summability_report(mod, {{"t", reference_b()}}, {1.0});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GT(rows[0].q3, 0.0);
  // v = p gives F = [[0, 1], [1, 0]]
  const FredholmModule flat = make_even_module(p, p, rep);
  EXPECT_EQ(max_abs(flat.F.topRightCorner(d, d) - Eigen::MatrixXcd::Identity(d, d)), 0.0);
  EXPECT_THROW(make_even_module(2.0 * p, p, rep), Error);
  EXPECT_THROW(make_even_module(v, Eigen::MatrixXcd::Identity(d, d), rep), Error);
}

TEST(Summability, CommutatorFormVerdicts) {
  std::vector<double> vals;
  for (int m = 1; m <= 1 << 14; ++m) vals.push_back(1.0 / m);
  const auto s = SingularSpectrum::from_values(vals);
  const auto rows = summability_report("harmonic", s, {0.5, 3.0});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].verdict, Verdict::DivergentTrend);
  EXPECT_EQ(rows[1].verdict, Verdict::Convergent);
  EXPECT_NEAR(rows[1].q3, std::cbrt(static_cast<double>(schatten_p_power(s, 3.0))), 1e-12);
}

TEST(Calculus, ContourExpMatchesSeries) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXcd s = random_matrix(6, rng) * 0.7;
    const Circle c = default_contour(s);
    const auto e = contour_calculus(s, [](Complex z) { return std::exp(z); }, c);
    EXPECT_LT(max_abs(e - exp_series(s)) / max_abs(exp_series(s)), 1e-8);
    const auto sq = contour_calculus(s, [](Complex z) { return z * z; }, c);
    EXPECT_LT(max_abs(sq - s * s), 1e-10 * (1 + max_abs(s * s)));
  }
  // Hermitian oracle
  const Eigen::MatrixXcd h0 = random_matrix(5, rng), h = (h0 + h0.adjoint()) / 2.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::MatrixXcd oracle =
      es.eigenvectors() * es.eigenvalues().array().exp().matrix().cast<Complex>().asDiagonal() *
      es.eigenvectors().adjoint();
  EXPECT_LT(max_abs(exp_series(h) - oracle) / max_abs(oracle), 1e-12);
}

TEST(Calculus, ContourErrors) {
  const Eigen::MatrixXcd s = Eigen::Vector3cd(0.0, 1.0, 2.0).asDiagonal();
  const auto f = [](Complex z) { return z; };
  EXPECT_THROW(contour_calculus(s, f, Circle{0.0, 1.0, 64}), Error);      // passes through 1
  EXPECT_THROW(contour_calculus(s, f, Circle{0.0, 1.5, 64}), Error);      // misses 2
  EXPECT_NO_THROW(contour_calculus_partial(s, f, Circle{0.0, 1.5, 64}));
  EXPECT_THROW(resolvent(s, 1.0), Error);
  try {
    resolvent(s, 2.0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SingularResolvent);
  }
}

TEST(Calculus, ResolventCommutatorIdentity) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = random_matrix(7, rng), t = random_matrix(7, rng);
    const Circle c = default_contour(s);
    EXPECT_LT(resolvent_commutator_check(s, t, c.center + c.radius).residual, 1e-12);
    for (double p : {1.0, 2.0}) {
      const CommutatorBound cb = contour_commutator_bound(s, t, [](Complex z) { return z * z; }, c, p);
      EXPECT_LE(cb.direct, cb.bound);
      EXPECT_GT(cb.direct, 0.0);
    }
  }
}

TEST(Calculus, CornerBothCases) {
  std::mt19937 rng(13);
  const Eigen::Index d = 8, r = 4;
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXcd w = random_unitary(d, rng);
    Eigen::MatrixXcd p0 = Eigen::MatrixXcd::Zero(d, d);
    p0.topLeftCorner(r, r).setIdentity();
    const Eigen::MatrixXcd p = w * p0 * w.adjoint();
    // corner element with spectrum in [1, 2.5]
    Eigen::MatrixXcd bc0 = Eigen::MatrixXcd::Zero(d, d);
    const Eigen::MatrixXcd k = random_unitary(r, rng);
    const Eigen::MatrixXcd diag = Eigen::Vector4cd(1.0, 1.5, 2.0, 2.5).asDiagonal();
    bc0.topLeftCorner(r, r) = k * diag * k.adjoint() + 0.1 * Eigen::MatrixXcd(random_matrix(r, rng)).triangularView<Eigen::StrictlyUpper>().toDenseMatrix();
    Eigen::MatrixXcd b = w * bc0 * w.adjoint();
    b = p * b * p;
    const CornerCheck enclosed = corner_calculus_check(p, b, [](Complex z) { return std::exp(z); },
                                                       Circle{1.25, 2.5, 256}, CornerCase::ZeroEnclosed);
    EXPECT_LT(enclosed.calculus_residual, 1e-9);
    EXPECT_LT(enclosed.resolvent_residual, 1e-9);
    const auto inv = [](Complex z) { return 1.0 / z; };
    const CornerCheck separated = corner_calculus_check(p, b, inv, Circle{1.75, 1.25, 256}, CornerCase::ZeroSeparated);
    EXPECT_LT(separated.calculus_residual, 1e-9);
    EXPECT_LT(separated.resolvent_residual, 1e-9);
    // in the corner 1/z is the inverse of b on the range of p
    const Eigen::MatrixXcd g = contour_calculus_partial(b, inv, Circle{1.75, 1.25, 256});
    EXPECT_LT(max_abs(g * b - p), 1e-9);
    EXPECT_THROW(corner_calculus_check(p, b, inv, Circle{1.0, 1.5, 256}, CornerCase::ZeroSeparated), Error);
  }
}
