#pragma once

// Exact symbolic dynamics for irreducible topological Markov chains whose
// points are restricted to the eventually periodic class.

#include <climits>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tmclab/errors.hpp"

namespace tmc {

using Symbol = int;
using Word = std::vector<Symbol>;
using Index = long long;

inline constexpr Index kNegInf = LLONG_MIN;
inline constexpr Index kPosInf = LLONG_MAX;

enum class Side { Stable, Unstable };
const char* side_name(Side s);
inline Side opposite(Side s) { return s == Side::Stable ? Side::Unstable : Side::Stable; }

struct MetricParams {
  double kappa = 2.0;
};
void validate_params(const MetricParams& p);

class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  explicit TransitionMatrix(const std::vector<std::vector<int>>& rows);

  int size() const { return n_; }
  bool allowed(Symbol a, Symbol b) const { return bits_[static_cast<std::size_t>(a * n_ + b)] != 0; }
  TransitionMatrix transposed() const;
  TransitionMatrix permuted(const std::vector<int>& perm) const;
  std::vector<std::vector<int>> rows() const;

 private:
  int n_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Throws ZeroRowOrColumn or NotIrreducible.
void validate_matrix(const TransitionMatrix& m);

// Log of the Perron root, by power iteration on M + I from the all-ones vector
// (M + I is primitive whenever M is irreducible, so periodic chains converge too).
double entropy(const TransitionMatrix& m);
double hausdorff_dimension(const TransitionMatrix& m, const MetricParams& p);

// A bi-infinite sequence ...uuu core vvv... with the core starting at index
// start. Instances are always in canonical form: primitive cycles, a minimal
// core, and for purely periodic points the Lyndon rotation with empty core.
class Point {
 public:
  Point() = default;
  static Point make(Word left, Word core, Word right, Index start);
  // x_i = cycle[(i - phase) mod |cycle|]
  static Point periodic(const Word& cycle, Index phase = 0);
  static Point parse(const std::string& text);

  Symbol at(Index i) const;
  const Word& left() const { return left_; }
  const Word& core() const { return core_; }
  const Word& right() const { return right_; }
  Index start() const { return start_; }
  Index core_end() const { return start_ + static_cast<Index>(core_.size()); }
  bool is_periodic() const { return core_.empty() && left_ == right_; }

  // "(u)*|core@start|(v)*" with symbols written as 0-9a-z.
  std::string str() const;

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;

 private:
  Word left_{0};
  Word core_;
  Word right_{0};
  Index start_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const Point& x) { return os << x.str(); }

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept;
};

bool is_allowed(const Point& x, const TransitionMatrix& m);

Point shift(const Point& x, Index k);                        // y_i = x_{i+k}
Point reverse(const Point& x);                               // y_i = x_{-i}
Point splice(const Point& past, const Point& future, Index k);  // past on i<k, future on i>=k

// Smallest index where x and y differ (kNegInf if their left tails differ,
// kPosInf if x == y); last_disagreement is the mirror.
Index first_disagreement(const Point& x, const Point& y);
Index last_disagreement(const Point& x, const Point& y);
inline bool agree_upto(const Point& x, const Point& y, Index k) { return first_disagreement(x, y) > k; }
inline bool agree_from(const Point& x, const Point& y, Index k) { return last_disagreement(x, y) < k; }

// Largest n with x_i = y_i for |i| < n; nullopt when x == y.
std::optional<Index> agreement_radius(const Point& x, const Point& y);

// A distance of the form kappa^{-exp}, or zero. Ordering follows the value.
struct KDist {
  Index exp = kPosInf;  // kPosInf encodes 0
  static KDist zero() { return {}; }
  static KDist one() { return {0}; }
  static KDist pow(Index e) { return {e}; }
  bool is_zero() const { return exp == kPosInf; }
  double value(double kappa) const;
  friend bool operator==(const KDist&, const KDist&) = default;
  friend std::strong_ordering operator<=>(const KDist& a, const KDist& b) { return b.exp <=> a.exp; }
};
inline KDist kmax(KDist a, KDist b) { return a < b ? b : a; }

KDist point_distance(const Point& x, const Point& y);
double metric(const Point& x, const Point& y, const MetricParams& p);

// [x,y]_n = y_n for n <= 0 and x_n for n >= 1. Throws BracketUndefined when x_0 != y_0.
Point bracket(const Point& x, const Point& y);

// Definitional test of y in X^s(x, kappa^{-eps_exp}) or X^u(x, kappa^{-eps_exp}):
// strict metric inequality plus the bracket fixed-point equation. eps_exp >= 1.
bool local_set_membership(const Point& x, const Point& y, Index eps_exp, Side side);

// Closed forms of the same sets: X^s(x, kappa^{-e}) = {y : y_i = x_i, i >= -e},
// X^u(x, kappa^{-e}) = {y : y_i = x_i, i <= e}.
inline bool in_local_stable(const Point& x, const Point& y, Index e) { return agree_from(x, y, -e); }
inline bool in_local_unstable(const Point& x, const Point& y, Index e) { return agree_upto(x, y, e); }

class PeriodicOrbit {
 public:
  PeriodicOrbit() = default;
  // Stores the Lyndon rotation; throws InvalidInput if the word is not primitive
  // or not allowed around its wrap.
  PeriodicOrbit(const Word& cycle, const TransitionMatrix& m);
  const Word& cycle() const { return cycle_; }
  std::size_t period() const { return cycle_.size(); }
  std::vector<Point> points() const;
  bool contains_tail(const Word& cycle) const;  // is `cycle` a rotation of this orbit's cycle
  friend bool operator==(const PeriodicOrbit&, const PeriodicOrbit&) = default;

 private:
  Word cycle_{0};
};

bool orbits_disjoint(const PeriodicOrbit& a, const PeriodicOrbit& b);

// Points with left tail on Q, right tail on P, canonical core length <= L and
// core contained in the index window [-L, L]. Sorted by canonical encoding.
// Throws OrbitsNotDisjoint.
std::vector<Point> enumerate_homoclinic(const TransitionMatrix& m, const PeriodicOrbit& p,
                                        const PeriodicOrbit& q, int core_bound);

// All allowed points with x_i = past_i for i <= k and x_i = future_i for i >= k2.
// When k >= k2 - 1 there is at most one such point.
std::vector<Point> enumerate_cylinder(const TransitionMatrix& m, const Point& past, Index k,
                                      const Point& future, Index k2, std::size_t limit);

// The same set further restricted to x_i = pin[i - pin_start] on a nonempty pinned
// range lying strictly between k and k2.
std::vector<Point> enumerate_pinned_cylinder(const TransitionMatrix& m, const Point& past, Index k,
                                             const Point& future, Index k2, const Word& pin, Index pin_start,
                                             std::size_t limit);

// Words w of length len with from -> w_0 -> ... -> w_{len-1} -> to allowed.
// Throws BasisCapExceeded past the limit.
std::vector<Word> bridge_words(const TransitionMatrix& m, Symbol from, Index len, Symbol to, std::size_t limit);
// The lexicographically least such word.
std::optional<Word> first_bridge_word(const TransitionMatrix& m, Symbol from, Index len, Symbol to);
// Their number, (M^{len+1})_{from,to}. Throws InvalidInput on 64-bit overflow.
std::uint64_t count_bridge_words(const TransitionMatrix& m, Symbol from, Index len, Symbol to);
// Words of length len >= 1 that start with `first` and end with `last`.
std::uint64_t count_words(const TransitionMatrix& m, Symbol first, Index len, Symbol last);

// Lyndon (least) rotation offset of a word.
std::size_t least_rotation(const Word& w);
Word primitive_root(const Word& w);

// Signature identifying x restricted to i <= k; equal signatures iff equal pasts.
std::string past_signature(const Point& x, Index k);
std::string future_signature(const Point& x, Index k);

}  // namespace tmc
