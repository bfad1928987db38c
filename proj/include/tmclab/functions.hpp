#pragma once

// Locally constant functions on the stable and unstable groupoids, their
// convolution *-algebra and automorphism, and the fundamental representation
// on l^2 of the homoclinic points.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tmclab/groupoid.hpp"

namespace tmc {

using Complex = std::complex<double>;

// coeff * sum_{j=from}^{to} ratio^{j-from} [z_j == symbol]
struct SeriesWeight {
  Symbol symbol = 0;
  Index from = 0;
  Index to = -1;
  double ratio = 0.5;
  Complex coeff{1.0, 0.0};
  friend bool operator==(const SeriesWeight&, const SeriesWeight&) = default;
};

// Value of a term as a function of the source point: a constant plus an optional
// truncated coordinate series. A series only depends on finitely many
// coordinates, so the term stays locally constant; the series is a compressed
// form of its expansion into indicators of smaller bisections.
struct Weight {
  Complex constant{1.0, 0.0};
  std::optional<SeriesWeight> series;

  bool is_constant() const { return !series; }
  Complex at(const Point& z) const;
  // at(z1) - at(z2), summed only over coordinates where z1 and z2 differ.
  Complex diff(const Point& z1, const Point& z2) const;
  double sup() const;  // bound on |at|
  bool series_reads(Index lo, Index hi) const;  // series range meets [lo, hi]
  friend bool operator==(const Weight&, const Weight&) = default;
};

// The compact open bisection {(h(z), z) : z in domain}. Stable side: the domain is
// {z : z_i = c2_i for i <= radius + 1} and h(z) is c1 on i <= time and z on
// i > time, where (c1, c2) is the anchor. Unstable side: the time-reversed mirror.
// Base sets are the case c_s(anchor) <= time <= radius with time >= 0; images
// under the automorphism keep the same shape with shifted integers.
struct Bisection {
  GroupoidElement anchor;
  Index radius = 0;
  Index time = 0;
  friend bool operator==(const Bisection&, const Bisection&) = default;
};

// Requires time <= radius and anchor coordinates agreeing beyond time. Throws InvalidInput.
Bisection make_bisection(const GroupoidElement& anchor, Index radius, Index time);
Bisection bisection_of(const BaseSet& v);
Side side_of(const Bisection& b);
bool in_domain(const Bisection& b, const Point& z);
Point apply(const Bisection& b, const Point& z);  // z must lie in the domain
bool contains(const Bisection& b, const GroupoidElement& g);
// Last coordinate read by the domain test (stable) or first (unstable).
Index domain_edge(const Bisection& b);

struct Term {
  Bisection set;
  Weight weight;
  friend bool operator==(const Term&, const Term&) = default;
};

struct Function {
  Side side = Side::Stable;
  std::vector<Term> terms;
  friend bool operator==(const Function&, const Function&) = default;
};

Function indicator(const BaseSet& v, Complex coeff = 1.0);
Function scaled(const Function& f, Complex c);
Function sum(const Function& f, const Function& g);  // SideMismatch

Complex evaluate(const Function& f, const GroupoidElement& g);  // SideMismatch
// Sum over terms of sup|w| kappa^{max(radius,0)+1} plus the series variation
// sum_j |coeff| ratio^{j-from} kappa^{|j|}.
double lipschitz_constant(const Function& f, const MetricParams& p);
// Throws SideMismatch, and InvalidInput when a product of two series weights would be needed.
Function convolve(const Function& f, const Function& g);
Function involution(const Function& f);
// f composed with Phi^{-k}.
Function alpha(const Function& f, Index k);
// Conjugation by time reversal; swaps the side.
Function time_reverse(const Function& f);
// Rewrites series weights as indicator terms on refined bisections (small ranges only).
Function expand_series(const Function& f, const TransitionMatrix& m);

// ------------------------------------------------------------ Hilbert space

class BasisRegistry {
 public:
  explicit BasisRegistry(std::size_t cap = 20000) : cap_(cap) {}
  std::size_t size() const { return points_.size(); }
  std::size_t cap() const { return cap_; }
  const Point& point(std::size_t i) const { return points_[i]; }
  const std::vector<Point>& points() const { return points_; }
  std::optional<std::size_t> find(const Point& x) const;
  // Index of x, adding it if new. Throws BasisCapExceeded at the cap.
  std::size_t insert(const Point& x);
  // As insert, but counts a truncation event and returns nullopt at the cap.
  std::optional<std::size_t> try_insert(const Point& x);
  std::size_t truncation_events() const { return truncations_; }

 private:
  std::size_t cap_;
  std::vector<Point> points_;
  std::unordered_map<Point, std::size_t, PointHash> index_;
  std::size_t truncations_ = 0;
};

struct SparseOperator {
  std::size_t dim = 0;
  std::map<std::pair<std::size_t, std::size_t>, Complex> entries;
  void add(std::size_t row, std::size_t col, Complex v);
  Complex at(std::size_t row, std::size_t col) const;
};

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
SparseOperator adjoint(const SparseOperator& a);
SparseOperator scaled(const SparseOperator& a, Complex c);
SparseOperator identity_operator(std::size_t dim);
// Keeps the columns with index < ncols.
SparseOperator restrict_columns(const SparseOperator& a, std::size_t ncols);
double max_abs_difference(const SparseOperator& a, const SparseOperator& b);

// a delta_x = sum over terms with x in the domain of w(x) delta_{h(x)}. Columns are
// the points present on entry; images are added to the registry.
SparseOperator represent(const Function& f, BasisRegistry& basis);
// u delta_x = delta_{phi(x)} on the points present on entry.
SparseOperator unitary_u(BasisRegistry& basis);

// ------------------------------------------------------------ commutator blocks

enum class CommutatorKind {
  Plain,  // alpha^n(a) b - b alpha^n(a)
  Mixed,  // alpha^n(a) alpha^{-n}(b) - alpha^{-n}(b) alpha^n(a)
};

// Exact assembly of R = A B - B A for a stable function A and an unstable function
// B, on the columns where either product can be nonzero.
class CommutatorAssembler {
 public:
  CommutatorAssembler(const TransitionMatrix& m, Function a, Function b);

  // Support columns, deduplicated and sorted. With a pin, only those with
  // x_i = pin[i - pin_start]; the pin must lie strictly between the edges.
  std::vector<Point> columns(std::size_t limit, const Word& pin = {}, Index pin_start = 0) const;

  struct Column {
    std::vector<std::pair<Point, Complex>> entries;  // sorted by row point, nonzero
    bool reads_pinned = false;  // some uncancelled contribution depends on the pinned range
  };
  Column act(const Point& x, Index pin_lo = 1, Index pin_hi = 0) const;

  // Coordinates strictly between these are neither read by any domain test nor
  // written by any holonomy.
  Index stable_edge() const { return stable_edge_; }
  Index unstable_edge() const { return unstable_edge_; }
  const TransitionMatrix& matrix() const { return *m_; }

 private:
  const TransitionMatrix* m_;
  Function a_, b_;
  Index stable_edge_ = kNegInf, unstable_edge_ = kPosInf;
};

struct BlockOperator {
  Index n_min = 0, n_max = -1;
  std::map<Index, SparseOperator> blocks;
  std::map<Index, std::size_t> truncation_events;  // nonzero marks an untrusted block
  bool trusted(Index n) const;
  std::vector<Index> untrusted() const;
};

// The pair (alpha^n(a), b) or (alpha^n(a), alpha^{-n}(b)) entering block n.
std::pair<Function, Function> block_functions(const Function& a, const Function& b, Index n, CommutatorKind kind);

// R_n for n in [n_min, n_max] on the shared registry. A block whose points do not
// fit under the cap is left empty and flagged.
BlockOperator commutator_blocks(const TransitionMatrix& m, const Function& a, const Function& b, Index n_min,
                                Index n_max, BasisRegistry& basis, CommutatorKind kind = CommutatorKind::Plain);

// ------------------------------------------------------------ intersections

// Unstable disk: points agreeing with center on i <= exp; stable disk: on i >= -exp.
struct Disk {
  Point center;
  Index exp = 0;
};

// Number of points in phi^k(unstable) intersected with stable, by enumeration.
std::uint64_t intersection_count(const TransitionMatrix& m, const Disk& unstable, const Disk& stable, Index k,
                                 std::size_t limit = 1u << 22);

}  // namespace tmc
