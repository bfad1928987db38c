#include "tmclab/functions.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tmc {

namespace {

bool agree_on(const Point& x, const Point& y, Index lo, Index hi) {
  for (Index i = lo; i <= hi; ++i)
    if (x.at(i) != y.at(i)) return false;
  return true;
}

// Moves the series coordinates j <= upto into the constant, reading them from `fixed`.
Weight fold_prefix(Weight w, const Point& fixed, Index upto) {
  if (!w.series) return w;
  SeriesWeight& s = *w.series;
  double pw = 1.0;
  Index j = s.from;
  for (; j <= std::min(s.to, upto); ++j, pw *= s.ratio)
    if (fixed.at(j) == s.symbol) w.constant += s.coeff * pw;
  if (j > s.to) {
    w.series.reset();
  } else {
    s.coeff *= pw;
    s.from = j;
  }
  return w;
}

// Moves the series coordinates j >= from into the constant, reading them from `fixed`.
Weight fold_suffix(Weight w, const Point& fixed, Index from) {
  if (!w.series) return w;
  SeriesWeight& s = *w.series;
  const Index lo = std::max(s.from, from);
  double pw = std::pow(s.ratio, static_cast<double>(lo - s.from));
  for (Index j = lo; j <= s.to; ++j, pw *= s.ratio)
    if (fixed.at(j) == s.symbol) w.constant += s.coeff * pw;
  s.to = std::min(s.to, from - 1);
  if (s.to < s.from) w.series.reset();
  return w;
}

Weight times(Weight w, Complex c) {
  w.constant *= c;
  if (w.series) w.series->coeff *= c;
  return w;
}

Weight conjugate(Weight w) {
  w.constant = std::conj(w.constant);
  if (w.series) w.series->coeff = std::conj(w.series->coeff);
  return w;
}

}  // namespace

// ---------------------------------------------------------------- weights

Complex Weight::at(const Point& z) const {
  Complex v = constant;
  if (series) {
    double pw = 1.0, acc = 0.0;
    for (Index j = series->from; j <= series->to; ++j, pw *= series->ratio)
      if (z.at(j) == series->symbol) acc += pw;
    v += series->coeff * acc;
  }
  return v;
}

Complex Weight::diff(const Point& z1, const Point& z2) const {
  if (!series) return 0.0;
  double pw = 1.0, acc = 0.0;
  for (Index j = series->from; j <= series->to; ++j, pw *= series->ratio) {
    const Symbol a = z1.at(j), b = z2.at(j);
    if (a == b) continue;
    if (a == series->symbol) acc += pw;
    if (b == series->symbol) acc -= pw;
  }
  return series->coeff * acc;
}

double Weight::sup() const {
  double s = std::abs(constant);
  if (series) {
    double pw = 1.0;
    for (Index j = series->from; j <= series->to; ++j, pw *= series->ratio) s += std::abs(series->coeff) * pw;
  }
  return s;
}

bool Weight::series_reads(Index lo, Index hi) const {
  return series && series->from <= series->to && series->from <= hi && series->to >= lo;
}

// ---------------------------------------------------------------- bisections

Bisection make_bisection(const GroupoidElement& anchor, Index radius, Index time) {
  if (time > radius) throw Error(Errc::InvalidInput, "bisection time exceeds its radius");
  if (anchor.side == Side::Stable) {
    if (last_disagreement(anchor.first, anchor.second) > time)
      throw Error(Errc::InvalidInput, "anchor coordinates differ after the bisection time");
  } else if (first_disagreement(anchor.first, anchor.second) < -time) {
    throw Error(Errc::InvalidInput, "anchor coordinates differ before minus the bisection time");
  }
  return {anchor, radius, time};
}

Bisection bisection_of(const BaseSet& v) { return {v.anchor, v.radius_exp, v.time}; }

Side side_of(const Bisection& b) { return b.anchor.side; }

bool in_domain(const Bisection& b, const Point& z) {
  if (b.anchor.side == Side::Stable) return agree_upto(z, b.anchor.second, b.radius + 1);
  return agree_from(z, b.anchor.second, -(b.radius + 1));
}

Point apply(const Bisection& b, const Point& z) {
  if (b.anchor.side == Side::Stable) return splice(b.anchor.first, z, b.time + 1);
  return splice(z, b.anchor.first, -b.time);
}

bool contains(const Bisection& b, const GroupoidElement& g) {
  return g.side == b.anchor.side && in_domain(b, g.second) && apply(b, g.second) == g.first;
}

Index domain_edge(const Bisection& b) { return b.anchor.side == Side::Stable ? b.radius + 1 : -(b.radius + 1); }

// ---------------------------------------------------------------- functions

Function indicator(const BaseSet& v, Complex coeff) {
  return {v.anchor.side, {Term{bisection_of(v), Weight{coeff, std::nullopt}}}};
}

Function scaled(const Function& f, Complex c) {
  Function g = f;
  for (Term& t : g.terms) t.weight = times(t.weight, c);
  return g;
}

Function sum(const Function& f, const Function& g) {
  if (f.side != g.side && !f.terms.empty() && !g.terms.empty())
    throw Error(Errc::SideMismatch, "functions live on different groupoids");
  Function h = f.terms.empty() ? Function{g.side, {}} : Function{f.side, {}};
  h.terms = f.terms;
  h.terms.insert(h.terms.end(), g.terms.begin(), g.terms.end());
  return h;
}

Complex evaluate(const Function& f, const GroupoidElement& g) {
  if (g.side != f.side) throw Error(Errc::SideMismatch, "element and function live on different groupoids");
  Complex v = 0.0;
  for (const Term& t : f.terms)
    if (contains(t.set, g)) v += t.weight.at(g.second);
  return v;
}

double lipschitz_constant(const Function& f, const MetricParams& p) {
  validate_params(p);
  double total = 0.0;
  for (const Term& t : f.terms) {
    const double reach = static_cast<double>(std::max<Index>(t.set.radius, 0) + 1);
    total += t.weight.sup() * std::pow(p.kappa, reach);
    if (const auto& s = t.weight.series) {
      double pw = 1.0;
      for (Index j = s->from; j <= s->to; ++j, pw *= s->ratio)
        total += std::abs(s->coeff) * pw * std::pow(p.kappa, static_cast<double>(std::llabs(j)));
    }
  }
  return total;
}

Function time_reverse(const Function& f) {
  Function g{opposite(f.side), {}};
  for (const Term& t : f.terms) {
    Term r{{time_reverse(t.set.anchor), t.set.radius, t.set.time}, t.weight};
    if (auto& s = r.weight.series) {
      const Index from = s->from, to = s->to;
      s->coeff *= std::pow(s->ratio, static_cast<double>(to - from));
      s->ratio = 1.0 / s->ratio;
      s->from = -to;
      s->to = -from;
    }
    g.terms.push_back(std::move(r));
  }
  return g;
}

Function convolve(const Function& f, const Function& g) {
  if (f.terms.empty() || g.terms.empty()) return {f.terms.empty() ? g.side : f.side, {}};
  if (f.side != g.side) throw Error(Errc::SideMismatch, "functions live on different groupoids");
  if (f.side == Side::Unstable) return time_reverse(convolve(time_reverse(f), time_reverse(g)));
  Function h{Side::Stable, {}};
  for (const Term& v : f.terms)
    for (const Term& w : g.terms) {
      const Bisection &V = v.set, &W = w.set;
      // range of W: agreement with c1(W) on i <= radius(W)+1; domain of V likewise with c2(V)
      if (!agree_upto(W.anchor.first, V.anchor.second, std::min(V.radius, W.radius) + 1)) continue;
      const Point z0 = W.radius >= V.radius ? W.anchor.second : splice(W.anchor.second, V.anchor.second, W.radius + 2);
      const Point y0 = apply(V, apply(W, z0));
      Bisection set{{y0, z0, Side::Stable}, std::max(V.radius, W.radius), std::max(V.time, W.time)};
      // the left factor is evaluated at h_W(z), which is c1(W) on i <= time(W)
      Weight left = fold_prefix(v.weight, W.anchor.first, W.time);
      Weight weight;
      if (left.is_constant()) {
        weight = times(w.weight, left.constant);
      } else if (w.weight.is_constant()) {
        weight = times(left, w.weight.constant);
      } else {
        throw Error(Errc::InvalidInput, "convolution of two series weights is not supported");
      }
      h.terms.push_back({set, weight});
    }
  return h;
}

Function involution(const Function& f) {
  Function g{f.side, {}};
  for (const Term& t : f.terms) {
    const Bisection& b = t.set;
    // the new source y has h^{-1}(y) = c2 on the coordinates the holonomy rewrites
    Weight w = b.anchor.side == Side::Stable ? fold_prefix(t.weight, b.anchor.second, b.time)
                                             : fold_suffix(t.weight, b.anchor.second, -b.time);
    g.terms.push_back({{inverse(b.anchor), b.radius, b.time}, conjugate(w)});
  }
  return g;
}

Function alpha(const Function& f, Index k) {
  Function g{f.side, {}};
  for (const Term& t : f.terms) {
    const Index d = t.set.anchor.side == Side::Stable ? -k : k;
    Term r{{phi_auto(t.set.anchor, k), t.set.radius + d, t.set.time + d}, t.weight};
    if (auto& s = r.weight.series) {
      s->from -= k;
      s->to -= k;
    }
    g.terms.push_back(std::move(r));
  }
  return g;
}

Function expand_series(const Function& f, const TransitionMatrix& m) {
  if (f.side == Side::Unstable) return time_reverse(expand_series(time_reverse(f), m));
  constexpr std::size_t kMaxTerms = 1u << 16;
  Function g{Side::Stable, {}};
  for (const Term& t : f.terms) {
    const Bisection& b = t.set;
    const Point& c2 = b.anchor.second;
    Weight w = fold_prefix(t.weight, c2, b.radius + 1);
    g.terms.push_back({b, Weight{w.constant, std::nullopt}});
    if (!w.series) continue;
    const SeriesWeight& s = *w.series;
    double pw = 1.0;
    for (Index j = s.from; j <= s.to; ++j, pw *= s.ratio) {
      // refine the domain by the word on (radius+1, j] ending in the series symbol
      for (Word word : bridge_words(m, c2.at(b.radius + 1), j - b.radius - 2, s.symbol, kMaxTerms)) {
        word.push_back(s.symbol);
        std::optional<Point> z;
        for (Index gap = 0; !z && gap <= 2 * m.size() + 2; ++gap) {
          auto pts = enumerate_pinned_cylinder(m, c2, b.radius + 1, c2, j + 1 + gap, word, b.radius + 2, kMaxTerms);
          if (!pts.empty()) z = pts.front();
        }
        if (!z) throw Error(Errc::InvalidInput, "cannot complete a refined cylinder");
        g.terms.push_back({{{apply(b, *z), *z, Side::Stable}, j - 1, b.time}, Weight{s.coeff * pw, std::nullopt}});
        if (g.terms.size() > kMaxTerms) throw Error(Errc::InvalidInput, "series expansion too large");
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------- Hilbert space

std::optional<std::size_t> BasisRegistry::find(const Point& x) const {
  auto it = index_.find(x);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t BasisRegistry::insert(const Point& x) {
  if (auto i = find(x)) return *i;
  if (points_.size() >= cap_) {
    ++truncations_;
    throw Error(Errc::BasisCapExceeded, "basis cap of " + std::to_string(cap_) + " points reached");
  }
  index_.emplace(x, points_.size());
  points_.push_back(x);
  return points_.size() - 1;
}

std::optional<std::size_t> BasisRegistry::try_insert(const Point& x) {
  if (auto i = find(x)) return i;
  if (points_.size() >= cap_) {
    ++truncations_;
    return std::nullopt;
  }
  index_.emplace(x, points_.size());
  points_.push_back(x);
  return points_.size() - 1;
}

void SparseOperator::add(std::size_t row, std::size_t col, Complex v) {
  if (v == Complex(0.0)) return;
  dim = std::max(dim, std::max(row, col) + 1);
  auto [it, fresh] = entries.emplace(std::make_pair(row, col), v);
  if (!fresh) {
    it->second += v;
    if (it->second == Complex(0.0)) entries.erase(it);
  }
}

Complex SparseOperator::at(std::size_t row, std::size_t col) const {
  auto it = entries.find({row, col});
  return it == entries.end() ? Complex(0.0) : it->second;
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  std::map<std::size_t, std::vector<std::pair<std::size_t, Complex>>> a_by_col;
  for (const auto& [rc, v] : a.entries) a_by_col[rc.second].push_back({rc.first, v});
  SparseOperator c;
  c.dim = std::max(a.dim, b.dim);
  for (const auto& [rc, v] : b.entries) {
    auto it = a_by_col.find(rc.first);
    if (it == a_by_col.end()) continue;
    for (const auto& [row, av] : it->second) c.add(row, rc.second, av * v);
  }
  return c;
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  SparseOperator c = a;
  c.dim = std::max(a.dim, b.dim);
  for (const auto& [rc, v] : b.entries) c.add(rc.first, rc.second, v);
  return c;
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) { return a + scaled(b, -1.0); }

SparseOperator adjoint(const SparseOperator& a) {
  SparseOperator c;
  c.dim = a.dim;
  for (const auto& [rc, v] : a.entries) c.entries[{rc.second, rc.first}] = std::conj(v);
  return c;
}

SparseOperator scaled(const SparseOperator& a, Complex s) {
  SparseOperator c;
  c.dim = a.dim;
  for (const auto& [rc, v] : a.entries) c.add(rc.first, rc.second, v * s);
  return c;
}

SparseOperator identity_operator(std::size_t dim) {
  SparseOperator c;
  c.dim = dim;
  for (std::size_t i = 0; i < dim; ++i) c.entries[{i, i}] = 1.0;
  return c;
}

SparseOperator restrict_columns(const SparseOperator& a, std::size_t ncols) {
  SparseOperator c;
  c.dim = a.dim;
  for (const auto& [rc, v] : a.entries)
    if (rc.second < ncols) c.entries.emplace(rc, v);
  return c;
}

double max_abs_difference(const SparseOperator& a, const SparseOperator& b) {
  double m = 0.0;
  for (const auto& [rc, v] : a.entries) m = std::max(m, std::abs(v - b.at(rc.first, rc.second)));
  for (const auto& [rc, v] : b.entries)
    if (!a.entries.count(rc)) m = std::max(m, std::abs(v));
  return m;
}

SparseOperator represent(const Function& f, BasisRegistry& basis) {
  const std::size_t cols = basis.size();
  SparseOperator op;
  for (std::size_t x = 0; x < cols; ++x) {
    const Point z = basis.point(x);
    for (const Term& t : f.terms)
      if (in_domain(t.set, z)) op.add(basis.insert(apply(t.set, z)), x, t.weight.at(z));
  }
  op.dim = basis.size();
  return op;
}

SparseOperator unitary_u(BasisRegistry& basis) {
  const std::size_t cols = basis.size();
  SparseOperator op;
  for (std::size_t x = 0; x < cols; ++x) {
    const Point z = basis.point(x);
    op.add(basis.insert(shift(z, 1)), x, 1.0);
  }
  op.dim = basis.size();
  return op;
}

// ---------------------------------------------------------------- commutators

CommutatorAssembler::CommutatorAssembler(const TransitionMatrix& m, Function a, Function b)
    : m_(&m), a_(std::move(a)), b_(std::move(b)) {
  if ((!a_.terms.empty() && a_.side != Side::Stable) || (!b_.terms.empty() && b_.side != Side::Unstable))
    throw Error(Errc::SideMismatch, "commutators pair a stable function with an unstable one");
  for (const Term& t : a_.terms) stable_edge_ = std::max(stable_edge_, domain_edge(t.set));
  for (const Term& t : b_.terms) unstable_edge_ = std::min(unstable_edge_, domain_edge(t.set));
}

std::vector<Point> CommutatorAssembler::columns(std::size_t limit, const Word& pin, Index pin_start) const {
  std::set<Point> out;
  auto cylinder = [&](const Point& past, Index k, const Point& future, Index k2) {
    auto pts = pin.empty() ? enumerate_cylinder(*m_, past, k, future, k2, limit)
                           : enumerate_pinned_cylinder(*m_, past, k, future, k2, pin, pin_start, limit);
    out.insert(pts.begin(), pts.end());
    if (out.size() > limit) throw Error(Errc::BasisCapExceeded, "support exceeds limit");
  };
  for (const Term& s : a_.terms)
    for (const Term& u : b_.terms) {
      const Point &c1 = s.set.anchor.first, &c2 = s.set.anchor.second;
      const Point &e1 = u.set.anchor.first, &e2 = u.set.anchor.second;
      const Index K = s.set.radius + 1, T = s.set.time;
      const Index Kp = -(u.set.radius + 1), M = u.set.time;
      // A B: x in dom(B) and h_B(x) in dom(A); h_B(x) is x on i < -M and e1 on i >= -M
      if (K < -M || agree_on(e1, c2, -M, K)) cylinder(c2, std::min(K, -M - 1), e2, Kp);
      // B A: x in dom(A) and h_A(x) in dom(B); h_A(x) is c1 on i <= T and x on i > T
      if (Kp > T || agree_on(c1, e2, Kp, T)) cylinder(c2, K, e2, std::max(Kp, T + 1));
    }
  return {out.begin(), out.end()};
}

CommutatorAssembler::Column CommutatorAssembler::act(const Point& x, Index pin_lo, Index pin_hi) const {
  std::map<Point, Complex> acc;
  Column col;
  for (const Term& s : a_.terms)
    for (const Term& u : b_.terms) {
      const Weight &wa = s.weight, &wb = u.weight;
      std::optional<Point> t1, t2, y, z;
      if (in_domain(u.set, x)) {
        y = apply(u.set, x);
        if (in_domain(s.set, *y)) t1 = apply(s.set, *y);
      }
      if (in_domain(s.set, x)) {
        z = apply(s.set, x);
        if (in_domain(u.set, *z)) t2 = apply(u.set, *z);
      }
      const bool reads = wa.series_reads(pin_lo, pin_hi) || wb.series_reads(pin_lo, pin_hi);
      if (t1 && t2 && *t1 == *t2) {
        // both orders land on the same point: subtract weights coordinatewise so
        // that coordinates untouched by either holonomy cancel exactly
        if (wb.is_constant()) {
          acc[*t1] += wb.constant * wa.diff(*y, x);
        } else if (wa.is_constant()) {
          acc[*t1] += wa.constant * wb.diff(x, *z);
        } else {
          acc[*t1] += wa.at(*y) * wb.at(x) - wb.at(*z) * wa.at(x);
          col.reads_pinned = col.reads_pinned || reads;
        }
        continue;
      }
      if (t1) acc[*t1] += wa.at(*y) * wb.at(x);
      if (t2) acc[*t2] -= wb.at(*z) * wa.at(x);
      if (t1 || t2) col.reads_pinned = col.reads_pinned || reads;
    }
  for (auto& [p, v] : acc)
    if (v != Complex(0.0)) col.entries.emplace_back(p, v);
  return col;
}

bool BlockOperator::trusted(Index n) const {
  auto it = truncation_events.find(n);
  return blocks.count(n) && (it == truncation_events.end() || it->second == 0);
}

std::vector<Index> BlockOperator::untrusted() const {
  std::vector<Index> out;
  for (Index n = n_min; n <= n_max; ++n)
    if (!trusted(n)) out.push_back(n);
  return out;
}

std::pair<Function, Function> block_functions(const Function& a, const Function& b, Index n, CommutatorKind kind) {
  return {alpha(a, n), kind == CommutatorKind::Plain ? b : alpha(b, -n)};
}

BlockOperator commutator_blocks(const TransitionMatrix& m, const Function& a, const Function& b, Index n_min,
                                Index n_max, BasisRegistry& basis, CommutatorKind kind) {
  BlockOperator out;
  out.n_min = n_min;
  out.n_max = n_max;
  for (Index n = n_min; n <= n_max; ++n) {
    auto [an, bn] = block_functions(a, b, n, kind);
    CommutatorAssembler ca(m, an, bn);
    std::vector<std::pair<Point, CommutatorAssembler::Column>> cols;
    std::set<Point> fresh;
    try {
      for (const Point& x : ca.columns(basis.cap())) {
        auto c = ca.act(x);
        if (c.entries.empty()) continue;
        if (!basis.find(x)) fresh.insert(x);
        for (const auto& e : c.entries)
          if (!basis.find(e.first)) fresh.insert(e.first);
        if (basis.size() + fresh.size() > basis.cap()) throw Error(Errc::BasisCapExceeded, "block exceeds the cap");
        cols.emplace_back(x, std::move(c));
      }
    } catch (const Error& e) {
      if (e.code() != Errc::BasisCapExceeded) throw;
      out.truncation_events[n] = 1;
      out.blocks[n] = SparseOperator{};
      continue;
    }
    SparseOperator op;
    for (const auto& [x, c] : cols) {
      const std::size_t j = basis.insert(x);
      for (const auto& [y, v] : c.entries) op.add(basis.insert(y), j, v);
    }
    out.truncation_events[n] = 0;
    out.blocks[n] = std::move(op);
  }
  for (auto& [n, op] : out.blocks) op.dim = basis.size();
  return out;
}

std::uint64_t intersection_count(const TransitionMatrix& m, const Disk& unstable, const Disk& stable, Index k,
                                 std::size_t limit) {
  return enumerate_cylinder(m, shift(unstable.center, k), unstable.exp - k, stable.center, -stable.exp, limit).size();
}

}  // namespace tmc
