#include "tmclab/auf.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace tmc {

CoverIndexParams cover_params(double lambda) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) throw Error(Errc::InvalidInput, "lambda must be > 1");
  CoverIndexParams cp;
  cp.lambda = lambda;
  cp.ceil_log3 = 1;
  for (double p = lambda; p < 3.0 * (1.0 - 1e-12); p *= lambda) ++cp.ceil_log3;
  return cp;
}

Index j_index(Index n_a, Index n, const CoverIndexParams& cp) { return std::max(n_a, n) + cp.ceil_log3; }

Index k_index(Index n_a1, Index n, const CoverIndexParams& cp) {
  if (n < 1) throw Error(Errc::InvalidInput, "k(a,n) needs n >= 1");
  return n == 1 ? 1 : n_a1 + (n - 1) * cp.ceil_log3;
}

Index floor_log(double lambda, double x) {
  Index e = 0;
  for (double p = lambda; p <= x * (1.0 + 1e-12); p *= lambda) ++e;
  return e;
}

// ---------------------------------------------------------------- cover system

SftCoverSystem::SftCoverSystem(double lambda) : cp_(cover_params(lambda)) {
  // eps'/2 = lambda^{-2}/2 and eta_N = lambda^{-N-2}/4
  stable_exp_ = floor_log(lambda, 2.0 * lambda * lambda);
  eta_offset_ = 2 + floor_log(lambda, 4.0);
}

Index SftCoverSystem::n_a(const GroupoidElement& a) const {
  if (a.side != Side::Stable) throw Error(Errc::SideMismatch, "cover system lives on the stable groupoid");
  Index last = last_disagreement(a.first, a.second);
  if (last == kPosInf) throw Error(Errc::InvalidInput, "coordinates are not stably equivalent");
  if (last == kNegInf) return 0;
  return std::max<Index>(0, last + stable_exp_ + 1);
}

Index SftCoverSystem::n_a_bruteforce(const GroupoidElement& a, Index cap) const {
  for (Index n = 0; n <= cap; ++n)
    if (local_set_membership(shift(a.first, n), shift(a.second, n), stable_exp_, Side::Stable)) return n;
  return -1;
}

BaseSet SftCoverSystem::v_set(const GroupoidElement& a, Index n) const {
  const Index t = std::max(n_a(a), n);
  return make_base_set(a, eta_exp(t) - 1, t);
}

bool SftCoverSystem::u_member(const GroupoidElement& b, const GroupoidElement& c, Index n) const {
  if (n < 0) throw Error(Errc::InvalidInput, "cover level must be nonnegative");
  if (b.side != Side::Stable || c.side != Side::Stable)
    throw Error(Errc::SideMismatch, "cover system lives on the stable groupoid");
  if (n == 0) return true;
  return base_set_membership(v_set(c, cover_index(c, n)), b);
}

// ---------------------------------------------------------------- tables

namespace {

// exponent n with v == 2^-n, or -1
int power_exponent(double v) {
  if (!(v > 0.0) || v > 1.0) return -1;
  int e = 0;
  double m = std::frexp(v, &e);
  return m == 0.5 ? 1 - e : -1;
}

std::string format_entry(double v) {
  if (v == 0.0) return "0";
  int n = power_exponent(v);
  if (n == 0) return "1";
  if (n > 0) return "2^-" + std::to_string(n);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_entry(const std::string& s) {
  if (s.rfind("2^-", 0) == 0) return std::ldexp(1.0, -std::stoi(s.substr(3)));
  return std::stod(s);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

void validate_table(const QuasimetricTable& t) {
  const std::size_t n = t.size();
  if (t.values.size() != n * n) throw Error(Errc::InvalidInput, "table is not square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double v = t.at(i, j);
      if (i == j && v != 0.0) throw Error(Errc::InvalidInput, "nonzero diagonal entry at " + t.ids[i]);
      if (i != j && power_exponent(v) < 0)
        throw Error(Errc::InvalidInput, "entry " + t.ids[i] + "," + t.ids[j] + " is not a power 2^-n");
      if (v != t.at(j, i)) throw Error(Errc::InvalidInput, "table is not symmetric");
    }
}

void write_table_csv(std::ostream& os, const QuasimetricTable& t) {
  os << "id";
  for (const auto& id : t.ids) os << ',' << id;
  os << '\n';
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << t.ids[i];
    for (std::size_t j = 0; j < t.size(); ++j) os << ',' << format_entry(t.at(i, j));
    os << '\n';
  }
}

QuasimetricTable read_table_csv(std::istream& is) {
  QuasimetricTable t;
  std::string line;
  if (!std::getline(is, line)) throw Error(Errc::InvalidInput, "empty table");
  auto head = split_csv(line);
  if (head.empty() || head[0] != "id") throw Error(Errc::InvalidInput, "table header must start with id");
  t.ids.assign(head.begin() + 1, head.end());
  const std::size_t n = t.ids.size();
  t.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw Error(Errc::InvalidInput, "table has too few rows");
    auto cells = split_csv(line);
    if (cells.size() != n + 1 || cells[0] != t.ids[i]) throw Error(Errc::InvalidInput, "malformed table row " + std::to_string(i));
    try {
      for (std::size_t j = 0; j < n; ++j) t.at(i, j) = parse_entry(cells[j + 1]);
    } catch (const std::logic_error&) {
      throw Error(Errc::InvalidInput, "unparseable table entry in row " + std::to_string(i));
    }
  }
  return t;
}

// ---------------------------------------------------------------- samples

CoverSample::CoverSample(const SftCoverSystem& sys, std::vector<GroupoidElement> elements, Index n_max)
    : sys_(&sys), elements_(std::move(elements)), n_max_(n_max) {
  const std::size_t s = elements_.size();
  n_a_.resize(s);
  last_dis_.resize(s);
  for (std::size_t i = 0; i < s; ++i) {
    n_a_[i] = sys.n_a(elements_[i]);
    last_dis_[i] = last_disagreement(elements_[i].first, elements_[i].second);
  }
  first1_.resize(s * s);
  first2_.resize(s * s);
  for (std::size_t e = 0; e < s; ++e)
    for (std::size_t c = 0; c < s; ++c) {
      first1_[e * s + c] = first_disagreement(elements_[e].first, elements_[c].first);
      first2_[e * s + c] = first_disagreement(elements_[e].second, elements_[c].second);
    }
  levels_.assign(s * s, 0);
  for (std::size_t b = 0; b < s; ++b)
    for (std::size_t c = 0; c < s; ++c) {
      Index lv = 0;
      while (lv < n_max_ && in_u(b, c, lv + 1)) ++lv;
      levels_[b * s + c] = lv;
    }
}

bool CoverSample::in_v(std::size_t e, std::size_t center, Index n) const {
  // (e1, e2) in V(c, eta_T, T) iff e2 agrees with c2 on i <= eta_exp(T),
  // e1 agrees with c1 on i <= T, and e1 agrees with e2 on i > T
  const std::size_t s = elements_.size();
  const Index t = std::max(n_a_[center], n);
  return first2_[e * s + center] > sys_->eta_exp(t) && first1_[e * s + center] > t && last_dis_[e] <= t;
}

bool CoverSample::in_u(std::size_t e, std::size_t center, Index n) const {
  if (n == 0) return true;
  return in_v(e, center, k_index(std::max<Index>(n_a_[center], 1), n, sys_->params()));
}

double CoverSample::rho(std::size_t a, std::size_t b, const std::vector<std::size_t>& centers) const {
  if (a == b || elements_[a] == elements_[b]) return 0.0;
  auto common = [&](std::size_t c) { return std::min(level(a, c), level(b, c)); };
  Index best = std::max(common(a), common(b));
  for (std::size_t c : centers) best = std::max(best, common(c));
  return std::ldexp(1.0, -static_cast<int>(best));
}

QuasimetricTable CoverSample::rho_table() const {
  const std::size_t s = elements_.size();
  QuasimetricTable t;
  for (std::size_t i = 0; i < s; ++i) t.ids.push_back("e" + std::to_string(i));
  t.values.assign(s * s, 0.0);
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = a + 1; b < s; ++b) {
      Index best = 0;
      for (std::size_t c = 0; c < s; ++c) best = std::max(best, std::min(level(a, c), level(b, c)));
      double v = elements_[a] == elements_[b] ? 0.0 : std::ldexp(1.0, -static_cast<int>(best));
      t.at(a, b) = t.at(b, a) = v;
    }
  return t;
}

QuasimetricTable chain_metric(const QuasimetricTable& rho) {
  QuasimetricTable d = rho;
  const std::size_t n = d.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = d.at(i, k);
      for (std::size_t j = 0; j < n; ++j) d.at(i, j) = std::min(d.at(i, j), dik + d.at(k, j));
    }
  return d;
}

CheckReport sandwich_check(const QuasimetricTable& rho, const QuasimetricTable& d) {
  CheckReport r;
  const std::size_t n = rho.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      ++r.checked;
      const double p = rho.at(i, j), v = d.at(i, j);
      if (v > p * (1 + 1e-12) || v < 0.25 * p * (1 - 1e-12)) {
        if (r.violations++ == 0) {
          std::ostringstream os;
          os.precision(17);
          os << rho.ids[i] << "," << rho.ids[j] << ": rho=" << p << " D=" << v;
          r.first_counterexample = os.str();
        }
      }
    }
  return r;
}

CheckReport star_check(const CoverSample& sample, Index n_levels, std::size_t triple_budget, std::uint64_t seed) {
  CheckReport r;
  const std::size_t s = sample.elements().size();
  std::vector<std::size_t> order(s);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto& cp = sample.system().params();
  for (std::size_t a : order) {
    for (Index n = 0; n <= n_levels; ++n) {
      const Index j = j_index(sample.n_a(a), n, cp);
      std::vector<std::size_t> near_a;
      for (std::size_t c = 0; c < s; ++c)
        if (sample.in_v(c, a, j)) near_a.push_back(c);
      for (std::size_t b = 0; b < s; ++b) {
        bool meets = std::any_of(near_a.begin(), near_a.end(), [&](std::size_t c) { return sample.in_v(c, b, j); });
        if (!meets) continue;
        for (std::size_t e = 0; e < s; ++e) {
          if (!sample.in_v(e, b, j)) continue;
          ++r.checked;
          if (!sample.in_v(e, a, n) && r.violations++ == 0)
            r.first_counterexample = "a=" + element_str(sample.elements()[a]) + " b=" +
                                     element_str(sample.elements()[b]) + " e=" + element_str(sample.elements()[e]) +
                                     " n=" + std::to_string(n);
          if (triple_budget && r.checked >= triple_budget) return r;
        }
      }
    }
  }
  return r;
}

DiameterReport diameter_bound_check(const SftCoverSystem& sys, const TransitionMatrix& m,
                                    const std::vector<GroupoidElement>& centers, Index k_max, Index free_width) {
  if (centers.empty() || k_max < 1 || free_width < 1)
    throw Error(Errc::InvalidInput, "diameter check needs centers, k_max >= 1 and free_width >= 1");
  DiameterReport rep;
  const int c3 = sys.params().ceil_log3;
  rep.predicted_base = std::pow(2.0, -1.0 / c3);
  for (Index k = 0; k <= k_max; ++k) {
    double worst = 0.0;
    std::size_t total = 0;
    for (const GroupoidElement& c : centers) {
      const Index t = sys.n_a(c), e = sys.eta_exp(t + k);
      BaseSet v = make_base_set(c, e - 1, t);
      auto zs = enumerate_cylinder(m, c.second, e, c.second, e + free_width + 1, 1u << 14);
      std::vector<GroupoidElement> members;
      for (const Point& z : zs) members.push_back(base_set_element(v, z));
      total += members.size();
      CoverSample cs(sys, members);
      auto d = chain_metric(cs.rho_table());
      for (double x : d.values) worst = std::max(worst, x);
    }
    if (worst == 0.0) throw Error(Errc::InsufficientData, "base set sample has a single element at k=" + std::to_string(k));
    rep.ks.push_back(k);
    rep.max_d.push_back(worst);
    rep.sizes.push_back(total);
  }
  const double n = static_cast<double>(rep.ks.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < rep.ks.size(); ++i) {
    double x = static_cast<double>(rep.ks[i]), y = std::log2(rep.max_d[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.base = std::pow(2.0, rep.slope);
  for (std::size_t i = 0; i < rep.ks.size(); ++i)
    rep.gamma_prime = std::max(rep.gamma_prime, rep.max_d[i] / std::pow(rep.predicted_base, static_cast<double>(rep.ks[i])));
  rep.within_tolerance = std::abs(rep.base / rep.predicted_base - 1.0) <= 0.10;
  return rep;
}

}  // namespace tmc
