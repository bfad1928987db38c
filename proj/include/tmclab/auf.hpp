#pragma once

// Alexandroff-Urysohn-Frink metrization: a 2-quasimetric from a nested cover
// system, its chain metric, and the cover system U_n(a) = V_{k(a,n)}(a)
// instantiated on the stable groupoid of a topological Markov chain.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tmclab/groupoid.hpp"

namespace tmc {

struct CoverIndexParams {
  double lambda = 2.0;
  int ceil_log3 = 2;  // smallest c with lambda^c >= 3
};
// Throws InvalidInput unless lambda > 1.
CoverIndexParams cover_params(double lambda);

// max(N_a, n) + ceil_log3
Index j_index(Index n_a, Index n, const CoverIndexParams& cp);
// k(a,1) = 1, k(a,n+1) = N_{a,1} + n * ceil_log3. Throws InvalidInput for n < 1.
Index k_index(Index n_a1, Index n, const CoverIndexParams& cp);

// Largest e with lambda^e <= x (x >= 1), robust to rounding.
Index floor_log(double lambda, double x);

// The cover system on the stable groupoid with eps'_X = lambda^{-2} and holonomy
// widths eta_N = lambda^{-N} eps'_X / 4, both snapped to the exponent lattice of
// the ultrametric (strict balls only see integer exponents).
class SftCoverSystem {
 public:
  explicit SftCoverSystem(double lambda = 2.0);

  const CoverIndexParams& params() const { return cp_; }
  double lambda() const { return cp_.lambda; }
  // phi^N(a2) in X^s(phi^N(a1), eps'/2) iff agreement on i >= -stable_exp() after the shift.
  Index stable_exp() const { return stable_exp_; }
  // X^u(z, eta_N) is agreement with z on i <= eta_exp(N).
  Index eta_exp(Index time) const { return time + eta_offset_; }

  // First N >= 0 with phi^N(a2) in X^s(phi^N(a1), eps'/2). Throws SideMismatch on the unstable side.
  Index n_a(const GroupoidElement& a) const;
  Index n_a_bruteforce(const GroupoidElement& a, Index cap = 256) const;

  // V_n(a) with time N_{a,n} = max(N_a, n) and radius eta_{N_{a,n}}.
  BaseSet v_set(const GroupoidElement& a, Index n) const;
  Index cover_index(const GroupoidElement& a, Index n) const { return k_index(std::max<Index>(n_a(a), 1), n, cp_); }
  // b in U_n(c); U_0(c) is the whole groupoid.
  bool u_member(const GroupoidElement& b, const GroupoidElement& c, Index n) const;

 private:
  CoverIndexParams cp_;
  Index stable_exp_ = 3;
  Index eta_offset_ = 4;
};

// ---------------------------------------------------------------- tables

// Symmetric table with entries in {0} u {2^-n}; 0 exactly on the diagonal.
struct QuasimetricTable {
  std::vector<std::string> ids;
  std::vector<double> values;  // row-major
  std::size_t size() const { return ids.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * ids.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * ids.size() + j]; }
};

// Throws InvalidInput on a broken invariant.
void validate_table(const QuasimetricTable& t);
void write_table_csv(std::ostream& os, const QuasimetricTable& t);
QuasimetricTable read_table_csv(std::istream& is);

// Membership levels of a finite sample in the cover system. level(b, c) is the
// largest n <= n_max with b in U_n(c).
class CoverSample {
 public:
  CoverSample(const SftCoverSystem& sys, std::vector<GroupoidElement> elements, Index n_max = 64);
  const std::vector<GroupoidElement>& elements() const { return elements_; }
  Index level(std::size_t b, std::size_t c) const { return levels_[b * elements_.size() + c]; }
  Index n_max() const { return n_max_; }
  const SftCoverSystem& system() const { return *sys_; }
  Index n_a(std::size_t c) const { return n_a_[c]; }

  // Closed-form test of element e in V_n(center), from precomputed disagreement indices.
  bool in_v(std::size_t e, std::size_t center, Index n) const;
  bool in_u(std::size_t e, std::size_t center, Index n) const;

  // rho(a, b) = 2^-n for the largest n with a, b in a common U_n(c), the centers c
  // ranging over `centers` (indices into the sample) together with a and b. Since
  // the true infimum runs over every center in the groupoid this is an upper bound.
  double rho(std::size_t a, std::size_t b, const std::vector<std::size_t>& centers) const;
  QuasimetricTable rho_table() const;  // all sample elements as centers

 private:
  const SftCoverSystem* sys_;
  std::vector<GroupoidElement> elements_;
  Index n_max_;
  std::vector<Index> n_a_, last_dis_, first1_, first2_;  // first1_/first2_ indexed [e * size + center]
  std::vector<Index> levels_;
};

// All-pairs shortest chains (Floyd-Warshall) with weights rho.
QuasimetricTable chain_metric(const QuasimetricTable& rho);

struct CheckReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::string first_counterexample;
  bool ok() const { return violations == 0; }
};

// rho/4 <= D <= rho, pairwise.
CheckReport sandwich_check(const QuasimetricTable& rho, const QuasimetricTable& d);

// Triples (a, b, e) of the sample with V_{j(a,n)}(a) and V_{j(a,n)}(b) meeting in a
// sample element and e in V_{j(a,n)}(b): each must have e in V_n(a). Levels n run over
// 0..n_levels; centers a are visited in a seeded order until the budget is spent
// (budget 0 means no limit).
CheckReport star_check(const CoverSample& sample, Index n_levels, std::size_t triple_budget, std::uint64_t seed);

struct DiameterReport {
  std::vector<Index> ks;
  std::vector<double> max_d;       // max chain distance inside the k-th base set
  std::vector<std::size_t> sizes;  // sample size per k
  double slope = 0.0;              // least-squares slope of log2(max_d) against k
  double base = 0.0;               // 2^slope
  double predicted_base = 0.0;     // 2^{-1/ceil_log3}
  double gamma_prime = 0.0;        // smallest constant with max_d <= predicted_base^k * gamma'
  bool within_tolerance = false;   // |base / predicted - 1| <= 0.10
};

// Base sets V(c, lambda^{-N-k} eps'/4, N) with N = N_c, for k = 0..k_max. Each is
// sampled by varying the free coordinates just beyond the holonomy disk, then rho
// and the chain metric are computed inside the sample.
DiameterReport diameter_bound_check(const SftCoverSystem& sys, const TransitionMatrix& m,
                                    const std::vector<GroupoidElement>& centers, Index k_max, Index free_width);

}  // namespace tmc
