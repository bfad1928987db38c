#include "tmclab/sft.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

namespace tmc {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ZeroRowOrColumn: return "ZeroRowOrColumn";
    case Errc::NotIrreducible: return "NotIrreducible";
    case Errc::BracketUndefined: return "BracketUndefined";
    case Errc::OrbitsNotDisjoint: return "OrbitsNotDisjoint";
    case Errc::OutsideDomain: return "OutsideDomain";
    case Errc::SideMismatch: return "SideMismatch";
    case Errc::NotComposable: return "NotComposable";
    case Errc::BasisCapExceeded: return "BasisCapExceeded";
    case Errc::UntrustedBlocks: return "UntrustedBlocks";
    case Errc::QuasiNormViolation: return "QuasiNormViolation";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::NotAProjection: return "NotAProjection";
    case Errc::NotCornerUnitary: return "NotCornerUnitary";
    case Errc::ContourHitsSpectrum: return "ContourHitsSpectrum";
    case Errc::SingularResolvent: return "SingularResolvent";
    case Errc::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

const char* side_name(Side s) { return s == Side::Stable ? "stable" : "unstable"; }

void validate_params(const MetricParams& p) {
  if (!(p.kappa > 1.0) || !std::isfinite(p.kappa)) throw Error(Errc::InvalidInput, "kappa must be > 1");
}

namespace {

Index mod(Index a, Index m) {
  Index r = a % m;
  return r < 0 ? r + m : r;
}

Index sz(const Word& w) { return static_cast<Index>(w.size()); }

Symbol raw_at(const Word& u, const Word& c, const Word& v, Index s, Index i) {
  if (i < s) return u[static_cast<std::size_t>(mod(i - s, sz(u)))];
  Index e = s + sz(c);
  if (i < e) return c[static_cast<std::size_t>(i - s)];
  return v[static_cast<std::size_t>(mod(i - e, sz(v)))];
}

Word rotate(const Word& w, std::size_t r) {
  Word out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[(i + r) % w.size()];
  return out;
}

char sym_char(Symbol s) {
  if (s < 10) return static_cast<char>('0' + s);
  return static_cast<char>('a' + (s - 10));
}

Symbol char_sym(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return 10 + (c - 'a');
  throw Error(Errc::InvalidInput, std::string("bad symbol character '") + c + "'");
}

std::string encode(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (Symbol x : w) s.push_back(sym_char(x));
  return s;
}

Word decode(const std::string& s) {
  Word w;
  w.reserve(s.size());
  for (char c : s) w.push_back(char_sym(c));
  return w;
}

}  // namespace

// ---------------------------------------------------------------- matrices

TransitionMatrix::TransitionMatrix(const std::vector<std::vector<int>>& rows) {
  n_ = static_cast<int>(rows.size());
  if (n_ == 0) throw Error(Errc::InvalidInput, "empty transition matrix");
  if (n_ > 36) throw Error(Errc::InvalidInput, "alphabet larger than 36 symbols");
  bits_.assign(static_cast<std::size_t>(n_ * n_), 0);
  for (int i = 0; i < n_; ++i) {
    if (static_cast<int>(rows[i].size()) != n_) throw Error(Errc::InvalidInput, "transition matrix is not square");
    for (int j = 0; j < n_; ++j) {
      int v = rows[i][j];
      if (v != 0 && v != 1) throw Error(Errc::InvalidInput, "transition matrix entries must be 0 or 1");
      bits_[static_cast<std::size_t>(i * n_ + j)] = static_cast<std::uint8_t>(v);
    }
  }
}

TransitionMatrix TransitionMatrix::transposed() const {
  TransitionMatrix t = *this;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) t.bits_[static_cast<std::size_t>(i * n_ + j)] = bits_[static_cast<std::size_t>(j * n_ + i)];
  return t;
}

TransitionMatrix TransitionMatrix::permuted(const std::vector<int>& perm) const {
  TransitionMatrix t = *this;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      t.bits_[static_cast<std::size_t>(i * n_ + j)] = bits_[static_cast<std::size_t>(perm[i] * n_ + perm[j])];
  return t;
}

std::vector<std::vector<int>> TransitionMatrix::rows() const {
  std::vector<std::vector<int>> r(static_cast<std::size_t>(n_), std::vector<int>(static_cast<std::size_t>(n_)));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r[i][j] = allowed(i, j) ? 1 : 0;
  return r;
}

void validate_matrix(const TransitionMatrix& m) {
  const int n = m.size();
  if (n == 0) throw Error(Errc::InvalidInput, "empty transition matrix");
  for (int i = 0; i < n; ++i) {
    bool row = false, col = false;
    for (int j = 0; j < n; ++j) {
      row = row || m.allowed(i, j);
      col = col || m.allowed(j, i);
    }
    if (!row) throw Error(Errc::ZeroRowOrColumn, "row " + std::to_string(i) + " is zero");
    if (!col) throw Error(Errc::ZeroRowOrColumn, "column " + std::to_string(i) + " is zero");
  }
  auto reach = [&](bool forward) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
      int a = q.front();
      q.pop();
      for (int b = 0; b < n; ++b) {
        bool e = forward ? m.allowed(a, b) : m.allowed(b, a);
        if (e && !seen[b]) {
          seen[b] = 1;
          q.push(b);
        }
      }
    }
    return seen;
  };
  for (bool fwd : {true, false}) {
    auto seen = reach(fwd);
    std::string missing;
    for (int i = 0; i < n; ++i)
      if (!seen[i]) missing += (missing.empty() ? "" : ",") + std::to_string(i);
    if (!missing.empty())
      throw Error(Errc::NotIrreducible, std::string(fwd ? "unreachable from 0: {" : "cannot reach 0: {") + missing + "}");
  }
}

double entropy(const TransitionMatrix& m) {
  const int n = m.size();
  std::vector<double> v(static_cast<std::size_t>(n), 1.0), w(static_cast<std::size_t>(n));
  double lo = 0.0, hi = 0.0;
  for (int it = 0; it < 100000; ++it) {
    for (int i = 0; i < n; ++i) {
      double s = v[i];
      for (int j = 0; j < n; ++j)
        if (m.allowed(i, j)) s += v[j];
      w[i] = s;
    }
    lo = INFINITY;
    hi = 0.0;
    double top = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = w[i] / v[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      top = std::max(top, w[i]);
    }
    for (int i = 0; i < n; ++i) v[i] = w[i] / top;
    if (hi - lo <= 1e-12 * hi) break;
  }
  double root = 0.5 * (lo + hi) - 1.0;
  return root <= 1.0 ? 0.0 : std::log(root);
}

double hausdorff_dimension(const TransitionMatrix& m, const MetricParams& p) {
  validate_params(p);
  return 2.0 * entropy(m) / std::log(p.kappa);
}

// ---------------------------------------------------------------- words

std::size_t least_rotation(const Word& w) {
  std::size_t best = 0;
  const std::size_t n = w.size();
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      Symbol a = w[(r + i) % n], b = w[(best + i) % n];
      if (a != b) {
        if (a < b) best = r;
        break;
      }
    }
  }
  return best;
}

Word primitive_root(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = w[i] == w[i % d];
    if (ok) return Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(d));
  }
  return w;
}

// ---------------------------------------------------------------- points

Point Point::make(Word u, Word c, Word v, Index s) {
  if (u.empty() || v.empty()) throw Error(Errc::InvalidInput, "point cycles must be nonempty");
  u = primitive_root(u);
  v = primitive_root(v);
  const Index U = sz(u), V = sz(v), e = s + sz(c);
  auto at = [&](Index i) { return raw_at(u, c, v, s, i); };

  Point p;
  if (U == V) {
    bool periodic = true;
    for (Index i = s; i < e + U && periodic; ++i) periodic = at(i) == at(i - U);
    if (periodic) {
      std::size_t r = least_rotation(u);
      p.left_ = rotate(u, r);
      p.right_ = p.left_;
      p.start_ = mod(s + static_cast<Index>(r), U);
      return p;
    }
  }
  const Index guard = sz(c) + U * V + U + V + 4;
  Index b = e;
  for (Index g = 0; at(b - 1) == at(b - 1 + V); ++g, --b)
    if (g > guard) throw std::logic_error("canonicalization did not terminate");
  Index a = s;
  for (Index g = 0; at(a) == at(a - U); ++g, ++a)
    if (g > guard) throw std::logic_error("canonicalization did not terminate");
  p.start_ = a >= b ? b : a;
  if (a < b)
    for (Index i = a; i < b; ++i) p.core_.push_back(at(i));
  p.left_.clear();
  for (Index i = p.start_ - U; i < p.start_; ++i) p.left_.push_back(at(i));
  p.right_.clear();
  for (Index i = b; i < b + V; ++i) p.right_.push_back(at(i));
  return p;
}

Point Point::periodic(const Word& cycle, Index phase) { return make(cycle, {}, cycle, phase); }

Point Point::parse(const std::string& text) {
  std::string t;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
  auto bar1 = t.find('|');
  auto bar2 = t.find('|', bar1 == std::string::npos ? 0 : bar1 + 1);
  auto at = t.find('@');
  if (bar1 == std::string::npos || bar2 == std::string::npos || at == std::string::npos || at < bar1 || at > bar2)
    throw Error(Errc::InvalidInput, "point encoding must look like (u)*|core@start|(v)*: " + text);
  auto cyc = [&](const std::string& s) {
    if (s.size() < 4 || s.front() != '(' || s.substr(s.size() - 2) != ")*")
      throw Error(Errc::InvalidInput, "bad cycle in point encoding: " + text);
    return decode(s.substr(1, s.size() - 3));
  };
  Word u = cyc(t.substr(0, bar1));
  Word v = cyc(t.substr(bar2 + 1));
  Word c = decode(t.substr(bar1 + 1, at - bar1 - 1));
  Index s = 0;
  try {
    s = std::stoll(t.substr(at + 1, bar2 - at - 1));
  } catch (const std::exception&) {
    throw Error(Errc::InvalidInput, "bad start index in point encoding: " + text);
  }
  if (u.empty() || v.empty()) throw Error(Errc::InvalidInput, "empty cycle in point encoding: " + text);
  return make(u, c, v, s);
}

Symbol Point::at(Index i) const { return raw_at(left_, core_, right_, start_, i); }

std::string Point::str() const {
  return "(" + encode(left_) + ")*|" + encode(core_) + "@" + std::to_string(start_) + "|(" + encode(right_) + ")*";
}

std::size_t PointHash::operator()(const Point& p) const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t x) {
    h ^= x;
    h *= 1099511628211ull;
  };
  for (Symbol s : p.left()) mix(static_cast<std::uint64_t>(s) + 1);
  mix(0xfeu);
  for (Symbol s : p.core()) mix(static_cast<std::uint64_t>(s) + 1);
  mix(0xfdu);
  for (Symbol s : p.right()) mix(static_cast<std::uint64_t>(s) + 1);
  mix(static_cast<std::uint64_t>(p.start()));
  return static_cast<std::size_t>(h);
}

bool is_allowed(const Point& x, const TransitionMatrix& m) {
  auto in_range = [&](const Word& w) {
    return std::all_of(w.begin(), w.end(), [&](Symbol s) { return s >= 0 && s < m.size(); });
  };
  if (!in_range(x.left()) || !in_range(x.core()) || !in_range(x.right())) return false;
  const Index lo = x.start() - sz(x.left()) - 1, hi = x.core_end() + sz(x.right());
  for (Index i = lo; i <= hi; ++i)
    if (!m.allowed(x.at(i), x.at(i + 1))) return false;
  return true;
}

Point shift(const Point& x, Index k) { return Point::make(x.left(), x.core(), x.right(), x.start() - k); }

Point reverse(const Point& x) {
  Word u(x.right().rbegin(), x.right().rend());
  Word c(x.core().rbegin(), x.core().rend());
  Word v(x.left().rbegin(), x.left().rend());
  return Point::make(u, c, v, -x.core_end() + 1);
}

Point splice(const Point& past, const Point& future, Index k) {
  const Index lo = std::min(past.start(), k), hi = std::max(future.core_end(), k);
  Word u, c, v;
  for (Index i = lo - sz(past.left()); i < lo; ++i) u.push_back(past.at(i));
  for (Index i = lo; i < hi; ++i) c.push_back(i < k ? past.at(i) : future.at(i));
  for (Index i = hi; i < hi + sz(future.right()); ++i) v.push_back(future.at(i));
  return Point::make(u, c, v, lo);
}

Index first_disagreement(const Point& x, const Point& y) {
  const Index ms = std::min(x.start(), y.start()), me = std::max(x.core_end(), y.core_end());
  const Index lu = std::lcm(sz(x.left()), sz(y.left())), lv = std::lcm(sz(x.right()), sz(y.right()));
  for (Index i = ms - lu; i < ms; ++i)
    if (x.at(i) != y.at(i)) return kNegInf;
  for (Index i = ms; i < me + lv; ++i)
    if (x.at(i) != y.at(i)) return i;
  return kPosInf;
}

Index last_disagreement(const Point& x, const Point& y) {
  const Index ms = std::min(x.start(), y.start()), me = std::max(x.core_end(), y.core_end());
  const Index lu = std::lcm(sz(x.left()), sz(y.left())), lv = std::lcm(sz(x.right()), sz(y.right()));
  for (Index i = me; i < me + lv; ++i)
    if (x.at(i) != y.at(i)) return kPosInf;
  for (Index i = me - 1; i >= ms - lu; --i)
    if (x.at(i) != y.at(i)) return i;
  return kNegInf;
}

std::optional<Index> agreement_radius(const Point& x, const Point& y) {
  if (x == y) return std::nullopt;
  const Index ms = std::min(x.start(), y.start()), me = std::max(x.core_end(), y.core_end());
  const Index lu = std::lcm(sz(x.left()), sz(y.left())), lv = std::lcm(sz(x.right()), sz(y.right()));
  Index best = kPosInf;
  for (Index i = 0; i < std::max<Index>(0, me) + lv; ++i)
    if (x.at(i) != y.at(i)) {
      best = i;
      break;
    }
  for (Index i = -1; i >= std::min<Index>(0, ms) - lu && -i < best; --i)
    if (x.at(i) != y.at(i)) {
      best = -i;
      break;
    }
  return best;
}

double KDist::value(double kappa) const { return is_zero() ? 0.0 : std::pow(kappa, -static_cast<double>(exp)); }

KDist point_distance(const Point& x, const Point& y) {
  auto r = agreement_radius(x, y);
  return r ? KDist::pow(*r) : KDist::zero();
}

double metric(const Point& x, const Point& y, const MetricParams& p) { return point_distance(x, y).value(p.kappa); }

Point bracket(const Point& x, const Point& y) {
  if (x.at(0) != y.at(0)) throw Error(Errc::BracketUndefined, "points differ at index 0");
  return splice(y, x, 1);
}

bool local_set_membership(const Point& x, const Point& y, Index eps_exp, Side side) {
  if (eps_exp < 1) throw Error(Errc::InvalidInput, "local sets need eps <= 1/kappa");
  auto r = agreement_radius(x, y);
  if (!r) return true;
  if (*r <= eps_exp) return false;
  return side == Side::Stable ? bracket(x, y) == y : bracket(y, x) == y;
}

// ---------------------------------------------------------------- orbits

PeriodicOrbit::PeriodicOrbit(const Word& cycle, const TransitionMatrix& m) {
  if (cycle.empty()) throw Error(Errc::InvalidInput, "empty orbit cycle");
  if (primitive_root(cycle).size() != cycle.size()) throw Error(Errc::InvalidInput, "orbit cycle is a proper power");
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    Symbol a = cycle[i], b = cycle[(i + 1) % cycle.size()];
    if (a < 0 || a >= m.size() || b < 0 || b >= m.size() || !m.allowed(a, b))
      throw Error(Errc::InvalidInput, "orbit cycle is not allowed by the transition matrix");
  }
  cycle_ = rotate(cycle, least_rotation(cycle));
}

std::vector<Point> PeriodicOrbit::points() const {
  std::vector<Point> out;
  for (std::size_t r = 0; r < cycle_.size(); ++r) out.push_back(Point::periodic(cycle_, static_cast<Index>(r)));
  return out;
}

bool PeriodicOrbit::contains_tail(const Word& w) const {
  if (w.size() != cycle_.size()) return false;
  return rotate(w, least_rotation(w)) == cycle_;
}

bool orbits_disjoint(const PeriodicOrbit& a, const PeriodicOrbit& b) { return !a.contains_tail(b.cycle()); }

// ---------------------------------------------------------------- enumeration

namespace {

// reach[s][a]: an allowed path of s steps leads from a to target.
std::vector<std::vector<char>> reach_table(const TransitionMatrix& m, Symbol target, Index steps) {
  const int n = m.size();
  std::vector<std::vector<char>> r(static_cast<std::size_t>(steps + 1), std::vector<char>(static_cast<std::size_t>(n), 0));
  r[0][target] = 1;
  for (Index s = 1; s <= steps; ++s)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n && !r[s][a]; ++b)
        if (m.allowed(a, b) && r[s - 1][b]) r[s][a] = 1;
  return r;
}

}  // namespace

std::vector<Point> enumerate_cylinder(const TransitionMatrix& m, const Point& past, Index k, const Point& future,
                                      Index k2, std::size_t limit) {
  if (k >= k2 - 1) {
    for (Index i = k2; i <= k; ++i)
      if (past.at(i) != future.at(i)) return {};
    if (!m.allowed(past.at(k), future.at(k + 1))) return {};
    return {splice(past, future, k + 1)};
  }
  const Index free = k2 - k - 1;
  const Symbol target = future.at(k2);
  auto reach = reach_table(m, target, free);
  const Index lo = std::min(past.start(), k + 1), hi = std::max(future.core_end(), k2);
  Word u, head, tail, v;
  for (Index i = lo - sz(past.left()); i < lo; ++i) u.push_back(past.at(i));
  for (Index i = lo; i <= k; ++i) head.push_back(past.at(i));
  for (Index i = k2; i < hi; ++i) tail.push_back(future.at(i));
  for (Index i = hi; i < hi + sz(future.right()); ++i) v.push_back(future.at(i));

  std::vector<Point> out;
  Word mid(static_cast<std::size_t>(free));
  std::vector<Symbol> next(static_cast<std::size_t>(free), 0);
  Index depth = 0;
  Symbol prev0 = past.at(k);
  while (depth >= 0) {
    if (depth == free) {
      Word c = head;
      c.insert(c.end(), mid.begin(), mid.end());
      c.insert(c.end(), tail.begin(), tail.end());
      out.push_back(Point::make(u, c, v, lo));
      if (out.size() > limit) throw Error(Errc::BasisCapExceeded, "cylinder enumeration exceeds limit");
      --depth;
      continue;
    }
    Symbol prev = depth == 0 ? prev0 : mid[static_cast<std::size_t>(depth - 1)];
    Symbol& cand = next[static_cast<std::size_t>(depth)];
    bool advanced = false;
    while (cand < m.size()) {
      Symbol s = cand++;
      // s sits at index k+1+depth, free-depth steps before the target at k2
      if (m.allowed(prev, s) && reach[static_cast<std::size_t>(free - depth)][s]) {
        mid[static_cast<std::size_t>(depth)] = s;
        advanced = true;
        break;
      }
    }
    if (advanced) {
      ++depth;
      if (depth < free) next[static_cast<std::size_t>(depth)] = 0;
    } else {
      next[static_cast<std::size_t>(depth)] = 0;
      --depth;
    }
  }
  return out;
}

std::vector<Word> bridge_words(const TransitionMatrix& m, Symbol from, Index len, Symbol to, std::size_t limit) {
  if (len < 0) throw Error(Errc::InvalidInput, "negative bridge length");
  std::vector<Word> out;
  if (len == 0) {
    if (m.allowed(from, to)) out.emplace_back();
    return out;
  }
  auto reach = reach_table(m, to, len);
  Word w(static_cast<std::size_t>(len));
  std::vector<Symbol> next(static_cast<std::size_t>(len), 0);
  Index depth = 0;
  while (depth >= 0) {
    if (depth == len) {
      out.push_back(w);
      if (out.size() > limit) throw Error(Errc::BasisCapExceeded, "bridge enumeration exceeds limit");
      --depth;
      continue;
    }
    const auto d = static_cast<std::size_t>(depth);
    Symbol prev = depth == 0 ? from : w[d - 1];
    bool advanced = false;
    while (next[d] < m.size()) {
      Symbol s = next[d]++;
      if (m.allowed(prev, s) && reach[static_cast<std::size_t>(len - depth)][s]) {
        w[d] = s;
        advanced = true;
        break;
      }
    }
    if (advanced) {
      ++depth;
      if (depth < len) next[static_cast<std::size_t>(depth)] = 0;
    } else {
      next[d] = 0;
      --depth;
    }
  }
  return out;
}

std::optional<Word> first_bridge_word(const TransitionMatrix& m, Symbol from, Index len, Symbol to) {
  if (len < 0) throw Error(Errc::InvalidInput, "negative bridge length");
  auto reach = reach_table(m, to, len);
  Word w;
  Symbol prev = from;
  for (Index d = 0; d < len; ++d) {
    Symbol pick = -1;
    for (Symbol s = 0; s < m.size() && pick < 0; ++s)
      if (m.allowed(prev, s) && reach[static_cast<std::size_t>(len - d)][s]) pick = s;
    if (pick < 0) return std::nullopt;
    w.push_back(pick);
    prev = pick;
  }
  if (!m.allowed(prev, to)) return std::nullopt;
  return w;
}

std::uint64_t count_bridge_words(const TransitionMatrix& m, Symbol from, Index len, Symbol to) {
  if (len < 0) throw Error(Errc::InvalidInput, "negative bridge length");
  const int n = m.size();
  // v[a] = number of allowed paths from `from` ending at a after the steps taken so far
  std::vector<std::uint64_t> v(static_cast<std::size_t>(n), 0), w(v.size());
  v[static_cast<std::size_t>(from)] = 1;
  for (Index step = 0; step <= len; ++step) {
    std::fill(w.begin(), w.end(), 0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (m.allowed(a, b) && __builtin_add_overflow(w[b], v[a], &w[b]))
          throw Error(Errc::InvalidInput, "word count overflows 64 bits");
    std::swap(v, w);
  }
  return v[static_cast<std::size_t>(to)];
}

std::uint64_t count_words(const TransitionMatrix& m, Symbol first, Index len, Symbol last) {
  if (len < 1) throw Error(Errc::InvalidInput, "word length must be positive");
  if (len == 1) return first == last ? 1 : 0;
  return count_bridge_words(m, first, len - 2, last);
}

std::vector<Point> enumerate_pinned_cylinder(const TransitionMatrix& m, const Point& past, Index k,
                                             const Point& future, Index k2, const Word& pin, Index pin_start,
                                             std::size_t limit) {
  const Index pin_end = pin_start + sz(pin) - 1;
  if (pin.empty() || pin_start <= k || pin_end >= k2)
    throw Error(Errc::InvalidInput, "pinned range must be nonempty and lie strictly inside the free range");
  for (std::size_t i = 1; i < pin.size(); ++i)
    if (!m.allowed(pin[i - 1], pin[i])) return {};
  auto left = bridge_words(m, past.at(k), pin_start - k - 1, pin.front(), limit);
  auto right = bridge_words(m, pin.back(), k2 - pin_end - 1, future.at(k2), limit);
  if (left.size() * right.size() > limit) throw Error(Errc::BasisCapExceeded, "cylinder enumeration exceeds limit");

  const Index lo = std::min(past.start(), k + 1), hi = std::max(future.core_end(), k2);
  Word u, head, tail, v;
  for (Index i = lo - sz(past.left()); i < lo; ++i) u.push_back(past.at(i));
  for (Index i = lo; i <= k; ++i) head.push_back(past.at(i));
  for (Index i = k2; i < hi; ++i) tail.push_back(future.at(i));
  for (Index i = hi; i < hi + sz(future.right()); ++i) v.push_back(future.at(i));
  std::vector<Point> out;
  out.reserve(left.size() * right.size());
  for (const Word& a : left)
    for (const Word& b : right) {
      Word c = head;
      c.insert(c.end(), a.begin(), a.end());
      c.insert(c.end(), pin.begin(), pin.end());
      c.insert(c.end(), b.begin(), b.end());
      c.insert(c.end(), tail.begin(), tail.end());
      out.push_back(Point::make(u, c, v, lo));
    }
  return out;
}

std::vector<Point> enumerate_homoclinic(const TransitionMatrix& m, const PeriodicOrbit& p, const PeriodicOrbit& q,
                                        int core_bound) {
  if (!orbits_disjoint(p, q)) throw Error(Errc::OrbitsNotDisjoint, "P and Q share an orbit");
  if (core_bound < 0) throw Error(Errc::InvalidInput, "core bound must be nonnegative");
  const Index L = core_bound;
  std::set<std::string> seen;
  std::vector<Point> out;
  const int n = m.size();
  for (std::size_t rq = 0; rq < q.period(); ++rq) {
    Word u = rotate(q.cycle(), rq);
    for (std::size_t rp = 0; rp < p.period(); ++rp) {
      Word v = rotate(p.cycle(), rp);
      for (Index s = -L; s <= L; ++s) {
        for (Index len = 0; len <= std::min(L, L - s); ++len) {
          Word w(static_cast<std::size_t>(len), 0);
          // odometer over all words of length len
          while (true) {
            Point x = Point::make(u, w, v, s);
            if (static_cast<Index>(x.core().size()) <= L && x.start() >= -L && x.core_end() <= L && is_allowed(x, m)) {
              if (seen.insert(x.str()).second) out.push_back(x);
            }
            Index i = 0;
            while (i < len && w[static_cast<std::size_t>(i)] == n - 1) w[static_cast<std::size_t>(i++)] = 0;
            if (i == len) break;
            ++w[static_cast<std::size_t>(i)];
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Point& a, const Point& b) { return a.str() < b.str(); });
  return out;
}

std::string past_signature(const Point& x, Index k) {
  const Index U = sz(x.left());
  Index a = x.start();
  while (a <= k && x.at(a) == x.at(a - U)) ++a;
  const Index p0 = std::min(a, k + 1);
  std::string s;
  for (Index i = p0 - U; i < p0; ++i) s.push_back(sym_char(x.at(i)));
  s.push_back('|');
  for (Index i = p0; i <= k; ++i) s.push_back(sym_char(x.at(i)));
  s.push_back('@');
  s += std::to_string(p0);
  return s;
}

std::string future_signature(const Point& x, Index k) { return past_signature(reverse(x), -k); }

}  // namespace tmc
