#pragma once

// Singular values, Schatten p-(quasi)norms, the blockwise decay schedule, and
// empirical summability verdicts.

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tmclab/functions.hpp"

namespace tmc {

// A singular value sequence in decreasing order, stored as levels (value,
// multiplicity) so that very large but highly degenerate spectra stay small.
struct SpectrumLevel {
  double value = 0.0;
  std::uint64_t multiplicity = 0;
  friend bool operator==(const SpectrumLevel&, const SpectrumLevel&) = default;
};

class SingularSpectrum {
 public:
  SingularSpectrum() = default;
  // Sorts, drops nonpositive values and merges exact duplicates.
  static SingularSpectrum from_values(std::vector<double> values, std::string source = {});
  static SingularSpectrum from_levels(std::vector<SpectrumLevel> levels, std::string source = {});

  const std::vector<SpectrumLevel>& levels() const { return levels_; }
  std::uint64_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  double largest() const { return levels_.empty() ? 0.0 : levels_.front().value; }
  // s_m with m counted from 1; zero past the end.
  double at(std::uint64_t m) const;
  // The first `limit` values written out.
  std::vector<double> values(std::uint64_t limit = UINT64_MAX) const;
  // Scales every value by |c|.
  SingularSpectrum scaled(double c) const;
  const std::string& source() const { return source_; }
  void set_source(std::string s) { source_ = std::move(s); }

 private:
  std::vector<SpectrumLevel> levels_;
  std::uint64_t size_ = 0;
  std::string source_;
};

// Union of spectra with multiplicities added.
SingularSpectrum merge(const std::vector<SingularSpectrum>& parts, std::string source = {});

// Values at most 1e-14 times the largest are dropped as numerical zeros.
inline constexpr double kZeroFloor = 1e-14;
SingularSpectrum singular_values(const Eigen::MatrixXcd& a);
// Densifies on the rows and columns that carry entries.
SingularSpectrum singular_values(const SparseOperator& a);
// Merged spectra of the blocks. Throws UntrustedBlocks listing flagged blocks.
SingularSpectrum block_singular_values(const BlockOperator& r);

long double schatten_p_power(const SingularSpectrum& s, double p);  // sum s_m^p
double schatten_norm(const SingularSpectrum& s, double p);          // throws InvalidInput for p <= 0

struct QuasiNormReport {
  double p = 1.0;
  int trials = 0;
  // max of ||S+T||_p^p / (||S||_p^p + ||T||_p^p); at most 1 in theory
  double max_power_ratio = 0.0;
  // max of ||S+T||_p / (2^{1/p} max(||S||_p, ||T||_p)); at most 1 in theory
  double max_quasi_ratio = 0.0;
  int power_violations = 0;  // ratio above 1 + 1e-9, reported as findings
};

// Random complex dim x dim pairs. Throws QuasiNormViolation if the 2^{1/p}
// quasi-triangle inequality fails by more than 1e-9 and InvalidInput unless 0 < p <= 1.
QuasiNormReport quasinorm_check(double p, int trials, std::uint64_t seed = 1, int dim = 4);

struct BoundCertificate {
  double C1 = 1.0, alpha = 2.0, C2 = 1.0, beta = 2.0;
  Index n0 = 0;
  double exponent = 1.0;  // log beta / log alpha
  std::vector<std::pair<std::uint64_t, double>> schedule;  // (index m, bound on s_m)
};

// For a direct sum of blocks n >= n0 with rank <= C1 alpha^n and norm <= C2 beta^{-n}:
// s_m <= C2 beta^{-n-1} at m = sum_{i=n0}^{n} floor(C1 alpha^i) + 1, for n0 <= n <= n_max.
// Throws InvalidInput unless alpha, beta > 1 and C1, C2 > 0.
BoundCertificate decay_bound_schedule(double C1, double alpha, double C2, double beta, Index n0, Index n_max);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  std::size_t samples = 0;
};

// Least squares of log s_m against log m for m in [m_lo, m_hi]. Indices up to
// 1024 are all used, beyond that a geometric grid of ratio 2^{1/16}. Throws
// InsufficientData with fewer than 10 positive samples.
DecayFit fit_decay_exponent(const SingularSpectrum& s, std::uint64_t m_lo, std::uint64_t m_hi);

// Least squares line through (x, y); r2 is 1 for constant y.
DecayFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

enum class Verdict { Convergent, DivergentTrend, Inconclusive };
const char* verdict_name(Verdict v);

struct SummabilityVerdict {
  double p = 1.0;
  std::vector<std::pair<std::uint64_t, long double>> checkpoints;  // (M, sum_{m <= M} s_m^p)
  long double total = 0.0;                                          // over the whole spectrum
  double final_relative_increment = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

// Partial sums at M = 1, 2, 4, ... up to the spectrum length. CONVERGENT when the
// last increment is below 1e-3 of the partial sum; DIVERGENT-TREND when the last
// ceil(K/2) increments (at least 3) are nondecreasing; INCONCLUSIVE otherwise.
// An empty spectrum is CONVERGENT.
SummabilityVerdict summability_verdict(const SingularSpectrum& s, double p);

}  // namespace tmc
