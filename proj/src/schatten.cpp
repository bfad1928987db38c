#include "tmclab/schatten.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace tmc {

// ---------------------------------------------------------------- spectra

SingularSpectrum SingularSpectrum::from_levels(std::vector<SpectrumLevel> levels, std::string source) {
  std::map<double, std::uint64_t, std::greater<>> merged;
  for (const SpectrumLevel& l : levels)
    if (l.value > 0.0 && l.multiplicity > 0) {
      std::uint64_t& slot = merged[l.value];
      if (__builtin_add_overflow(slot, l.multiplicity, &slot))
        throw Error(Errc::InvalidInput, "spectrum multiplicity overflows 64 bits");
    }
  SingularSpectrum s;
  s.source_ = std::move(source);
  for (const auto& [v, mult] : merged) {
    s.levels_.push_back({v, mult});
    if (__builtin_add_overflow(s.size_, mult, &s.size_))
      throw Error(Errc::InvalidInput, "spectrum length overflows 64 bits");
  }
  return s;
}

SingularSpectrum SingularSpectrum::from_values(std::vector<double> values, std::string source) {
  std::vector<SpectrumLevel> levels;
  levels.reserve(values.size());
  for (double v : values) levels.push_back({v, 1});
  return from_levels(std::move(levels), std::move(source));
}

double SingularSpectrum::at(std::uint64_t m) const {
  if (m == 0) throw Error(Errc::InvalidInput, "singular values are indexed from 1");
  for (const SpectrumLevel& l : levels_) {
    if (m <= l.multiplicity) return l.value;
    m -= l.multiplicity;
  }
  return 0.0;
}

std::vector<double> SingularSpectrum::values(std::uint64_t limit) const {
  std::vector<double> out;
  for (const SpectrumLevel& l : levels_)
    for (std::uint64_t i = 0; i < l.multiplicity; ++i) {
      if (out.size() >= limit) return out;
      out.push_back(l.value);
    }
  return out;
}

SingularSpectrum SingularSpectrum::scaled(double c) const {
  std::vector<SpectrumLevel> levels = levels_;
  for (SpectrumLevel& l : levels) l.value *= std::abs(c);
  return from_levels(std::move(levels), source_);
}

SingularSpectrum merge(const std::vector<SingularSpectrum>& parts, std::string source) {
  std::vector<SpectrumLevel> all;
  for (const SingularSpectrum& s : parts) all.insert(all.end(), s.levels().begin(), s.levels().end());
  return SingularSpectrum::from_levels(std::move(all), std::move(source));
}

SingularSpectrum singular_values(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return {};
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  const Eigen::VectorXd sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  std::vector<double> vals;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > kZeroFloor * top) vals.push_back(sv(i));
  return SingularSpectrum::from_values(std::move(vals));
}

SingularSpectrum singular_values(const SparseOperator& a) {
  if (a.entries.empty()) return {};
  std::map<std::size_t, Eigen::Index> rows, cols;
  for (const auto& [rc, v] : a.entries) {
    rows.emplace(rc.first, 0);
    cols.emplace(rc.second, 0);
  }
  Eigen::Index k = 0;
  for (auto& [r, i] : rows) i = k++;
  k = 0;
  for (auto& [c, i] : cols) i = k++;
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows.size()),
                                                  static_cast<Eigen::Index>(cols.size()));
  for (const auto& [rc, v] : a.entries) dense(rows[rc.first], cols[rc.second]) = v;
  return singular_values(dense);
}

SingularSpectrum block_singular_values(const BlockOperator& r) {
  const auto bad = r.untrusted();
  if (!bad.empty()) {
    std::string list;
    for (Index n : bad) list += (list.empty() ? "" : ", ") + std::to_string(n);
    throw Error(Errc::UntrustedBlocks, "untrusted blocks: " + list);
  }
  std::vector<SingularSpectrum> parts;
  for (const auto& [n, op] : r.blocks) parts.push_back(singular_values(op));
  return merge(parts, "blocks [" + std::to_string(r.n_min) + ", " + std::to_string(r.n_max) + "]");
}

long double schatten_p_power(const SingularSpectrum& s, double p) {
  if (!(p > 0.0)) throw Error(Errc::InvalidInput, "Schatten exponent must be positive");
  long double total = 0.0L;
  for (const SpectrumLevel& l : s.levels())
    total += static_cast<long double>(l.multiplicity) * std::pow(static_cast<long double>(l.value), static_cast<long double>(p));
  return total;
}

double schatten_norm(const SingularSpectrum& s, double p) {
  return static_cast<double>(std::pow(schatten_p_power(s, p), 1.0L / static_cast<long double>(p)));
}

// ---------------------------------------------------------------- quasi-norms

QuasiNormReport quasinorm_check(double p, int trials, std::uint64_t seed, int dim) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(Errc::InvalidInput, "quasi-norm check needs 0 < p <= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> shape(0, 3);
  auto random_matrix = [&](int kind) {
    Eigen::MatrixXcd a(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) a(i, j) = {g(rng), g(rng)};
    if (kind == 1) {  // low rank
      Eigen::VectorXcd v = a.col(0), w = a.col(1);
      a = v * w.adjoint();
    } else if (kind == 2) {  // strongly graded singular values
      Eigen::BDCSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::VectorXd s(dim);
      for (int i = 0; i < dim; ++i) s(i) = std::pow(10.0, -2.0 * i);
      a = svd.matrixU() * s.cast<std::complex<double>>().asDiagonal() * svd.matrixV().adjoint();
    }
    return a;
  };
  QuasiNormReport r;
  r.p = p;
  r.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXcd s = random_matrix(shape(rng) % 3);
    const Eigen::MatrixXcd u = random_matrix(shape(rng) % 3);
    const long double ps = schatten_p_power(singular_values(s), p);
    const long double pu = schatten_p_power(singular_values(u), p);
    const long double psu = schatten_p_power(singular_values(s + u), p);
    const double power_ratio = static_cast<double>(psu / (ps + pu));
    const double ns = schatten_norm(singular_values(s), p), nu = schatten_norm(singular_values(u), p);
    const double quasi_ratio = schatten_norm(singular_values(s + u), p) / (std::pow(2.0, 1.0 / p) * std::max(ns, nu));
    r.max_power_ratio = std::max(r.max_power_ratio, power_ratio);
    r.max_quasi_ratio = std::max(r.max_quasi_ratio, quasi_ratio);
    if (power_ratio > 1.0 + 1e-9) ++r.power_violations;
    if (quasi_ratio > 1.0 + 1e-9)
      throw Error(Errc::QuasiNormViolation, "quasi-triangle inequality fails with ratio " + std::to_string(quasi_ratio));
  }
  return r;
}

// ---------------------------------------------------------------- decay schedule

BoundCertificate decay_bound_schedule(double C1, double alpha, double C2, double beta, Index n0, Index n_max) {
  if (!(alpha > 1.0 && beta > 1.0 && C1 > 0.0 && C2 > 0.0))
    throw Error(Errc::InvalidInput, "decay schedule needs alpha, beta > 1 and positive constants");
  BoundCertificate c{C1, alpha, C2, beta, n0, std::log(beta) / std::log(alpha), {}};
  long double used = 0.0L;  // sum of floor(C1 alpha^i) so far
  for (Index n = n0; n <= n_max; ++n) {
    used += std::floor(static_cast<long double>(C1) * std::pow(static_cast<long double>(alpha), static_cast<long double>(n)));
    if (used + 1.0L >= 1.8e19L) break;
    const auto m = static_cast<std::uint64_t>(used) + 1;
    const double bound = C2 * std::pow(beta, static_cast<double>(-n - 1));
    // equal indices: the later bound is smaller and equally valid
    if (!c.schedule.empty() && c.schedule.back().first == m)
      c.schedule.back().second = bound;
    else
      c.schedule.emplace_back(m, bound);
  }
  return c;
}

// ---------------------------------------------------------------- fits and verdicts

DecayFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  DecayFit f;
  f.samples = n;
  if (n < 2) throw Error(Errc::InsufficientData, "a line fit needs at least two points");
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  long double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw Error(Errc::InsufficientData, "a line fit needs distinct abscissae");
  f.slope = static_cast<double>(sxy / sxx);
  f.intercept = static_cast<double>(my - sxy / sxx * mx);
  f.r2 = syy == 0 ? 1.0 : static_cast<double>(sxy * sxy / (sxx * syy));
  return f;
}

DecayFit fit_decay_exponent(const SingularSpectrum& s, std::uint64_t m_lo, std::uint64_t m_hi) {
  m_lo = std::max<std::uint64_t>(m_lo, 1);
  m_hi = std::min(m_hi, s.size());
  std::vector<double> x, y;
  // walk the levels once while visiting the sampled indices in order
  auto level = s.levels().begin();
  std::uint64_t level_end = level == s.levels().end() ? 0 : level->multiplicity;
  auto visit = [&](std::uint64_t m) {
    while (level != s.levels().end() && m > level_end) {
      ++level;
      if (level != s.levels().end()) level_end += level->multiplicity;
    }
    if (level == s.levels().end() || !(level->value > 0.0)) return;
    x.push_back(std::log(static_cast<double>(m)));
    y.push_back(std::log(level->value));
  };
  std::uint64_t m = m_lo;
  for (; m <= m_hi && m <= 1024; ++m) visit(m);
  for (long double g = static_cast<long double>(m); m <= m_hi;) {
    visit(m);
    g *= std::exp2(1.0L / 16.0L);
    m = std::max(m + 1, static_cast<std::uint64_t>(std::ceil(g)));
  }
  if (x.size() < 10) throw Error(Errc::InsufficientData, "fewer than 10 positive singular values in the window");
  return fit_line(x, y);
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Convergent: return "CONVERGENT";
    case Verdict::DivergentTrend: return "DIVERGENT-TREND";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

SummabilityVerdict summability_verdict(const SingularSpectrum& s, double p) {
  SummabilityVerdict v;
  v.p = p;
  v.total = schatten_p_power(s, p);
  const std::uint64_t n = s.size();
  long double partial = 0.0L;
  std::uint64_t seen = 0;
  std::uint64_t next = 1;
  bool done = n == 0;
  for (auto it = s.levels().begin(); !done && it != s.levels().end(); ++it) {
    const long double term = std::pow(static_cast<long double>(it->value), static_cast<long double>(p));
    std::uint64_t left = it->multiplicity;
    while (left > 0 && !done) {
      const std::uint64_t take = std::min(left, next - seen);
      partial += term * static_cast<long double>(take);
      seen += take;
      left -= take;
      if (seen == next) {
        v.checkpoints.emplace_back(next, partial);
        done = next > n / 2;
        next *= 2;
      }
    }
  }
  if (n == 0) {  // the zero operator lies in every Schatten class
    v.verdict = Verdict::Convergent;
    return v;
  }
  const std::size_t k = v.checkpoints.size();
  if (k < 2) return v;
  std::vector<long double> inc;
  for (std::size_t i = 1; i < k; ++i) inc.push_back(v.checkpoints[i].second - v.checkpoints[i - 1].second);
  v.final_relative_increment = static_cast<double>(inc.back() / v.checkpoints.back().second);
  if (v.final_relative_increment < 1e-3) {
    v.verdict = Verdict::Convergent;
    return v;
  }
  const std::size_t tail = std::max<std::size_t>(3, (inc.size() + 1) / 2);
  if (inc.size() < tail) return v;
  bool nondecreasing = true;
  for (std::size_t i = inc.size() - tail + 1; i < inc.size(); ++i)
    if (inc[i] < inc[i - 1] * (1.0L - 1e-12L)) nondecreasing = false;
  if (nondecreasing) v.verdict = Verdict::DivergentTrend;
  return v;
}

}  // namespace tmc
