#include "tmclab/audit.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace tmc {

void PropertyCheck::record(bool pass, const std::string& what) {
  ++checked;
  if (pass) return;
  if (violations++ == 0) first_counterexample = what;
}

void PropertyCheck::record(bool pass, const std::function<std::string()>& what) {
  ++checked;
  if (pass) return;
  if (violations++ == 0) first_counterexample = what();
}

bool AuditReport::ok() const { return violations() == 0; }

std::uint64_t AuditReport::violations() const {
  std::uint64_t v = 0;
  for (const PropertyCheck& c : checks) v += c.violations;
  return v;
}

const PropertyCheck* AuditReport::find(const std::string& name) const {
  for (const PropertyCheck& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

std::string str3(const Point& x, const Point& y, const Point& z) { return x.str() + " " + y.str() + " " + z.str(); }

// Stable elements are the equivalent pairs of enumerated points, stored as index pairs.
struct Elements {
  const std::vector<Point>* pts;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  Elements(const std::vector<Point>& p, const PeriodicOrbit& po, const PeriodicOrbit& qo) : pts(&p) {
    for (std::uint32_t i = 0; i < p.size(); ++i)
      for (std::uint32_t j = 0; j < p.size(); ++j)
        if (is_valid_element({p[i], p[j], Side::Stable}, po, qo)) pairs.emplace_back(i, j);
  }
  std::size_t size() const { return pairs.size(); }
  GroupoidElement operator[](std::size_t k) const {
    return {(*pts)[pairs[k].first], (*pts)[pairs[k].second], Side::Stable};
  }
};

void bracket_axioms(const std::vector<Point>& pts, AuditReport& rep) {
  PropertyCheck b1{"bracket B1 [x,x] = x"}, b2{"bracket B2 [x,[y,z]] = [x,z]"}, b3{"bracket B3 [[x,y],z] = [x,z]"},
      b4{"bracket B4 phi[x,y] = [phi x, phi y]"};
  for (const Point& x : pts) {
    b1.record(bracket(x, x) == x, [&] { return x.str(); });
    for (const Point& y : pts) {
      if (x.at(0) != y.at(0)) continue;
      const Point xy = bracket(x, y);
      if (x.at(1) == y.at(1))
        b4.record(bracket(shift(x, 1), shift(y, 1)) == shift(xy, 1), [&] { return x.str() + " " + y.str(); });
      for (const Point& z : pts) {
        if (z.at(0) != x.at(0)) continue;
        const Point xz = bracket(x, z);
        b2.record(bracket(x, bracket(y, z)) == xz, [&] { return str3(x, y, z); });
        b3.record(bracket(xy, z) == xz, [&] { return str3(x, y, z); });
      }
    }
  }
  for (auto* c : {&b1, &b2, &b3, &b4}) rep.checks.push_back(std::move(*c));
}

void contraction(const std::vector<Point>& pts, AuditReport& rep) {
  // y, z lie in a common X^s(x, 1/kappa) iff they agree on i >= -1
  PropertyCheck c1{"contraction C1 d(phi y, phi z) = d(y, z) / kappa on X^s"},
      c2{"contraction C2 d(phi^-1 y, phi^-1 z) = d(y, z) / kappa on X^u"};
  for (const Point& y : pts)
    for (const Point& z : pts) {
      if (y == z) continue;
      const Index e = point_distance(y, z).exp;
      if (in_local_stable(y, z, 1))
        c1.record(point_distance(shift(y, 1), shift(z, 1)).exp == e + 1, [&] { return y.str() + " " + z.str(); });
      if (in_local_unstable(y, z, 1))
        c2.record(point_distance(shift(y, -1), shift(z, -1)).exp == e + 1, [&] { return y.str() + " " + z.str(); });
    }
  rep.checks.push_back(std::move(c1));
  rep.checks.push_back(std::move(c2));
}

void point_ultrametric(const std::vector<Point>& pts, AuditReport& rep) {
  PropertyCheck c{"point metric strong triangle"};
  const std::size_t n = pts.size();
  std::vector<KDist> d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = point_distance(pts[i], pts[j]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        c.record(d[i * n + k] <= kmax(d[i * n + j], d[j * n + k]), [&] { return str3(pts[i], pts[j], pts[k]); });
  rep.checks.push_back(std::move(c));
}

void base_set_isometries(const TransitionMatrix& matrix, const Elements& els, std::uint64_t anchors,
                         std::mt19937_64& rng, const DistanceFn& d, AuditReport& rep) {
  PropertyCheck hol{"holonomy isometry"}, src{"source local isometry"}, rng_c{"range local isometry"};
  std::uniform_int_distribution<std::size_t> pick(0, els.size() - 1);
  for (std::uint64_t s = 0; s < anchors; ++s) {
    const GroupoidElement c = els[pick(rng)];
    const Index cs = c_s(c);
    for (Index n = cs; n <= cs + 1; ++n) {
      const BaseSet v = make_base_set(c, n, cs);
      // free coordinates just past the disk around the source
      std::vector<Point> dom;
      for (const Point& z : enumerate_cylinder(matrix, c.second, n + 1, c.second, n + 7, 64))
        if (in_holonomy_domain(v, z)) dom.push_back(z);
      for (const Point& z : dom)
        for (const Point& w : dom) {
          const auto what = [&] { return element_str(c) + " n=" + std::to_string(n) + " " + z.str() + " " + w.str(); };
          hol.record(point_distance(holonomy_apply(v, z), holonomy_apply(v, w)) == point_distance(z, w), what);
          const GroupoidElement a = base_set_element(v, z), b = base_set_element(v, w);
          const KDist dab = d(a, b);
          src.record(dab == units_distance(source(a), source(b)), what);
          rng_c.record(dab == units_distance(range(a), range(b)), what);
        }
    }
  }
  for (auto* c : {&hol, &src, &rng_c}) rep.checks.push_back(std::move(*c));
}

}  // namespace

AuditReport structure_audit(const AuditInput& in, const DistanceFn& d) {
  const std::vector<Point> pts = enumerate_homoclinic(in.matrix, in.p, in.q, in.core_bound);
  AuditReport rep;
  bracket_axioms(pts, rep);
  contraction(pts, rep);
  point_ultrametric(pts, rep);
  const Elements els(pts, in.p, in.q);
  std::mt19937_64 rng(in.seed);
  std::uniform_int_distribution<std::size_t> pick(0, els.size() - 1);
  PropertyCheck tri{"groupoid metric strong triangle"}, inv{"inversion isometry"};
  for (std::uint64_t s = 0; s < in.samples; ++s) {
    const GroupoidElement a = els[pick(rng)], b = els[pick(rng)], c = els[pick(rng)];
    tri.record(d(a, c) <= kmax(d(a, b), d(b, c)) && d(a, b) == d(b, a),
               [&] { return element_str(a) + " " + element_str(b) + " " + element_str(c); });
    inv.record(d(inverse(a), inverse(b)) == d(a, b), [&] { return element_str(a) + " " + element_str(b); });
  }
  rep.checks.push_back(std::move(tri));
  rep.checks.push_back(std::move(inv));
  base_set_isometries(in.matrix, els, std::max<std::uint64_t>(1, in.samples / 64), rng, d, rep);
  return rep;
}

AuditReport dynamics_audit(const AuditInput& in, const DistanceFn& d) {
  const std::vector<Point> pts = enumerate_homoclinic(in.matrix, in.p, in.q, in.core_bound);
  // buckets of elements whose coordinates agree on i <= 0
  const Index lo = -static_cast<Index>(in.core_bound) - static_cast<Index>(in.q.period()) - 1;
  std::map<Word, std::vector<std::size_t>> past;  // point index by its past word
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Word w;
    for (Index k = lo; k <= 0; ++k) w.push_back(pts[i].at(k));
    past[w].push_back(i);
  }
  std::vector<const std::vector<std::size_t>*> classes;
  for (const auto& [w, v] : past) classes.push_back(&v);
  std::vector<std::size_t> class_of(pts.size());
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (std::size_t i : *classes[c]) class_of[i] = c;

  std::mt19937_64 rng(in.seed);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  PropertyCheck sandwich{"sandwich D/kappa <= D o Phi^-1 <= D"}, exact{"exact contraction when D <= 1/kappa"};
  for (std::uint64_t s = 0; s < in.samples; ++s) {
    const std::size_t i = pick(rng), j = pick(rng);
    std::size_t k = pick(rng), l = pick(rng);
    if (s % 2 == 1) {
      const auto& ci = *classes[class_of[i]];
      const auto& cj = *classes[class_of[j]];
      k = ci[std::uniform_int_distribution<std::size_t>(0, ci.size() - 1)(rng)];
      l = cj[std::uniform_int_distribution<std::size_t>(0, cj.size() - 1)(rng)];
    }
    const GroupoidElement a{pts[i], pts[j], Side::Stable}, b{pts[k], pts[l], Side::Stable};
    if (!is_valid_element(a, in.p, in.q) || !is_valid_element(b, in.p, in.q)) {
      --s;  // redraw; both kinds of draw hit valid pairs with positive probability
      continue;
    }
    const KDist dab = d(a, b), d1 = d(phi_auto(a, -1), phi_auto(b, -1));
    const auto what = [&] { return element_str(a) + " " + element_str(b); };
    // kappa^{-1} D <= D1 <= D in exponents
    sandwich.record(d1 <= dab && (dab.is_zero() ? d1.is_zero() : d1.exp <= dab.exp + 1), what);
    if (!dab.is_zero() && dab.exp >= 1) exact.record(d1.exp == dab.exp + 1, what);
  }
  AuditReport rep;
  rep.checks.push_back(std::move(sandwich));
  rep.checks.push_back(std::move(exact));
  return rep;
}

AufAudit auf_audit(const AuditInput& in, std::size_t sample_size, std::size_t triples) {
  auto all = enumerate_stable_elements(in.matrix, in.p, in.q, in.core_bound);
  std::mt19937_64 rng(in.seed);
  std::shuffle(all.begin(), all.end(), rng);
  if (all.size() > sample_size) all.resize(sample_size);
  AufAudit out;
  out.sample_size = all.size();
  const SftCoverSystem sys;
  const CoverSample cs(sys, all);
  const QuasimetricTable rho = cs.rho_table();
  const CheckReport sw = sandwich_check(rho, chain_metric(rho));
  out.report.checks.push_back({"sandwich rho/4 <= D <= rho", sw.checked, sw.violations, sw.first_counterexample});
  const CheckReport st = star_check(cs, 6, triples, in.seed);
  out.report.checks.push_back({"star refinement", st.checked, st.violations, st.first_counterexample});
  // diameter regression around a unit and the first two sample elements
  std::vector<GroupoidElement> centers{unit(enumerate_homoclinic(in.matrix, in.p, in.q, 0).front())};
  for (std::size_t i = 0; i < std::min<std::size_t>(2, all.size()); ++i) centers.push_back(all[i]);
  out.diameter = diameter_bound_check(sys, in.matrix, centers, 12, 3);
  return out;
}

}  // namespace tmc
