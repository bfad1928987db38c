#include "tmclab/fredholm.hpp"

#include <algorithm>
#include <cmath>

#include "tmclab/errors.hpp"

namespace tmc {

// ------------------------------------------------------------ inflated operators

InflatedOperator operator*(const InflatedOperator& a, const InflatedOperator& b) {
  InflatedOperator c{std::min(a.n_min, b.n_min), std::max(a.n_max, b.n_max), {}};
  for (const auto& [rk, x] : a.blocks)
    for (const auto& [kc, y] : b.blocks) {
      if (rk.second != kc.first) continue;
      SparseOperator p = x * y;
      if (p.entries.empty()) continue;
      auto [it, fresh] = c.blocks.try_emplace({rk.first, kc.second}, std::move(p));
      if (!fresh) it->second = it->second + p;
    }
  return c;
}

InflatedOperator operator-(const InflatedOperator& a, const InflatedOperator& b) {
  InflatedOperator c = a;
  c.n_min = std::min(a.n_min, b.n_min);
  c.n_max = std::max(a.n_max, b.n_max);
  for (const auto& [rc, y] : b.blocks) {
    auto [it, fresh] = c.blocks.try_emplace(rc, scaled(y, -1.0));
    if (!fresh) it->second = it->second - y;
  }
  return c;
}

InflatedOperator restrict_columns(const InflatedOperator& a, std::size_t ncols) {
  InflatedOperator c{a.n_min, a.n_max, {}};
  for (const auto& [rc, x] : a.blocks) c.blocks.emplace(rc, restrict_columns(x, ncols));
  return c;
}

namespace {

// f u^j on the first `cols` points: delta_x -> f delta_{phi^j x}.
SparseOperator represent_shifted(const Function& f, Index j, std::size_t cols, BasisRegistry& basis) {
  SparseOperator op;
  for (std::size_t x = 0; x < cols; ++x) {
    const Point z = shift(basis.point(x), j);
    for (const Term& t : f.terms)
      if (in_domain(t.set, z)) op.add(basis.insert(apply(t.set, z)), x, t.weight.at(z));
  }
  op.dim = basis.size();
  return op;
}

}  // namespace

InflatedOperator inflate_stable(const Function& f, Index j, Index n_min, Index n_max, BasisRegistry& basis) {
  if (f.side != Side::Stable) throw Error(Errc::SideMismatch, "inflate_stable needs a stable function");
  InflatedOperator out{n_min, n_max, {}};
  const std::size_t cols = basis.size();
  for (Index n = n_min; n <= n_max; ++n)
    if (out.in_window(n + j)) out.blocks.emplace(std::pair{n, n + j}, represent_shifted(alpha(f, n), 0, cols, basis));
  return out;
}

InflatedOperator inflate_unstable(const Function& g, Index j, Index n_min, Index n_max, BasisRegistry& basis) {
  if (g.side != Side::Unstable) throw Error(Errc::SideMismatch, "inflate_unstable needs an unstable function");
  InflatedOperator out{n_min, n_max, {}};
  const std::size_t cols = basis.size();
  const SparseOperator block = represent_shifted(g, j, cols, basis);
  for (Index m = n_min; m <= n_max; ++m)
    if (out.in_window(m + j)) out.blocks.emplace(std::pair{m + j, m}, block);
  return out;
}

void seed_kpw_basis(const TransitionMatrix& m, const Function& a, const Function& b, Index n_min, Index n_max,
                    Index jp, BasisRegistry& basis) {
  for (Index n = n_min; n <= n_max; ++n) {
    const auto [an, bn] = block_functions(a, b, n, CommutatorKind::Plain);
    if (an.terms.empty() || bn.terms.empty()) continue;
    for (const Point& x : CommutatorAssembler(m, an, bn).columns(basis.cap())) {
      basis.insert(x);
      basis.insert(shift(x, -jp));
    }
  }
}

namespace {

// Rows n of [rho_s(a u^j), rho_u(b u^{j'})] on the first `cols` points.
std::map<Index, SparseOperator> inflated_commutator(const Function& a, Index j, const Function& b, Index jp,
                                                    Index n_min, Index n_max, const std::vector<Index>& rows,
                                                    std::size_t cols, BasisRegistry& basis) {
  // each factor acts on every point its partner can produce
  const InflatedOperator b1 = inflate_unstable(b, jp, n_min, n_max, basis);
  const InflatedOperator a1 = inflate_stable(a, j, n_min, n_max, basis);
  const InflatedOperator b2 = inflate_unstable(b, jp, n_min, n_max, basis);
  const InflatedOperator r = restrict_columns(a1 * b1 - b2 * a1, cols);
  std::map<Index, SparseOperator> out;
  for (Index n : rows) {
    auto it = r.blocks.find({n, n + j - jp});
    SparseOperator block = it == r.blocks.end() ? SparseOperator{} : it->second;
    block.dim = basis.size();
    out.emplace(n, std::move(block));
  }
  return out;
}

SingularSpectrum merged(const std::map<Index, SparseOperator>& blocks) {
  std::vector<SingularSpectrum> parts;
  for (const auto& [n, op] : blocks) parts.push_back(singular_values(op));
  return merge(parts);
}

}  // namespace

KpwCommutator kpw_commutator(const Function& a, Index j, const Function& b, Index jp,
                             Index n_min, Index n_max, BasisRegistry& basis) {
  KpwCommutator out;
  out.margin = std::max(std::abs(j), std::abs(jp)) + 1;
  const auto inside = [&](Index n) { return n_min <= n && n <= n_max; };
  for (Index n = n_min; n <= n_max; ++n) {
    const bool ok = n >= n_min + out.margin && n <= n_max - out.margin && inside(n + j) && inside(n - jp) &&
                    inside(n + j - jp);
    (ok ? out.rows : out.excluded).push_back(n);
  }
  const std::size_t cols = basis.size();
  out.blocks = inflated_commutator(a, j, b, jp, n_min, n_max, out.rows, cols, basis);
  out.spectrum = merged(out.blocks);
  out.reference = merged(inflated_commutator(a, 0, b, 0, n_min, n_max, out.rows, cols, basis));
  const auto x = out.spectrum.values(), y = out.reference.values();
  const double scale = std::max(1.0, out.reference.largest());
  if (x.size() != y.size()) {
    out.spectrum_gap = INFINITY;
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) out.spectrum_gap = std::max(out.spectrum_gap, std::abs(x[i] - y[i]) / scale);
  }
  return out;
}

// ------------------------------------------------------------ Fredholm modules

bool close_basis(const std::vector<Function>& fs, BasisRegistry& basis, int max_rounds) {
  std::vector<Function> all = fs;
  for (const Function& f : fs) all.push_back(involution(f));
  std::size_t done = 0;
  for (int round = 0; round < max_rounds; ++round) {
    const std::size_t cols = basis.size();
    if (done == cols) return true;
    for (std::size_t x = done; x < cols; ++x) {
      const Point z = basis.point(x);
      for (const Function& f : all)
        for (const Term& t : f.terms)
          if (in_domain(t.set, z) && !basis.try_insert(apply(t.set, z))) return false;
    }
    done = cols;
  }
  return done == basis.size();
}

Eigen::MatrixXcd dense_representation(const Function& f, const BasisRegistry& basis) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    const Point& z = basis.point(static_cast<std::size_t>(x));
    for (const Term& t : f.terms) {
      if (!in_domain(t.set, z)) continue;
      if (const auto y = basis.find(apply(t.set, z))) out(static_cast<Eigen::Index>(*y), x) += t.weight.at(z);
    }
  }
  return out;
}

namespace {

constexpr double kModuleTol = 1e-12;

double max_abs(const Eigen::MatrixXcd& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace

FredholmModule make_odd_module(const Eigen::MatrixXcd& e, std::function<Eigen::MatrixXcd(const Function&)> rep) {
  if (e.rows() != e.cols()) throw Error(Errc::NotAProjection, "projection must be square");
  const double herm = max_abs(e - e.adjoint()), idem = max_abs(e * e - e);
  if (herm > kModuleTol || idem > kModuleTol)
    throw Error(Errc::NotAProjection, "|e* - e| = " + std::to_string(herm) + ", |e^2 - e| = " + std::to_string(idem));
  FredholmModule mod;
  mod.parity = Parity::Odd;
  mod.F = 2.0 * e - Eigen::MatrixXcd::Identity(e.rows(), e.cols());
  mod.rep = std::move(rep);
  return mod;
}

FredholmModule make_even_module(const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& p,
                                std::function<Eigen::MatrixXcd(const Function&)> rep) {
  if (v.rows() != v.cols() || p.rows() != p.cols() || v.rows() != p.rows())
    throw Error(Errc::NotCornerUnitary, "v and p must be square of equal size");
  const double dev = std::max({max_abs(v.adjoint() * v - p), max_abs(v * v.adjoint() - p), max_abs(p * v * p - v),
                               max_abs(p - p.adjoint()), max_abs(p * p - p)});
  if (dev > kModuleTol) throw Error(Errc::NotCornerUnitary, "corner unitarity defect " + std::to_string(dev));
  const Eigen::Index d = v.rows();
  const Eigen::MatrixXcd w = v + Eigen::MatrixXcd::Identity(d, d) - p;
  FredholmModule mod;
  mod.parity = Parity::Even;
  mod.F = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  mod.F.topRightCorner(d, d) = w.adjoint();
  mod.F.bottomLeftCorner(d, d) = w;
  mod.rep = [rep = std::move(rep), d](const Function& f) {
    const Eigen::MatrixXcd r = rep(f);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
    out.topLeftCorner(d, d) = r;
    out.bottomRightCorner(d, d) = r;
    return out;
  };
  return mod;
}

// ------------------------------------------------------------ summability

std::vector<SummabilityRow> summability_report(const FredholmModule& mod,
                                               const std::vector<std::pair<std::string, Function>>& funcs,
                                               const std::vector<double>& p_grid) {
  const Eigen::MatrixXcd& F = mod.F;
  const Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(F.rows(), F.cols());
  std::vector<SummabilityRow> rows;
  for (const auto& [id, f] : funcs) {
    const Eigen::MatrixXcd a = mod.rep(f);
    const SingularSpectrum s1 = singular_values(Eigen::MatrixXcd(a * (F.adjoint() - F)));
    const SingularSpectrum s2 = singular_values(Eigen::MatrixXcd(a * (F * F - one)));
    const SingularSpectrum s3 = singular_values(Eigen::MatrixXcd(a * F - F * a));
    for (double p : p_grid)
      rows.push_back({id, p, schatten_norm(s1, p), schatten_norm(s2, p), schatten_norm(s3, p),
                      summability_verdict(s3, p).verdict});
  }
  return rows;
}

std::vector<SummabilityRow> summability_report(const std::string& func_id, const SingularSpectrum& commutator,
                                               const std::vector<double>& p_grid) {
  std::vector<SummabilityRow> rows;
  for (double p : p_grid)
    rows.push_back({func_id, p, 0.0, 0.0, schatten_norm(commutator, p), summability_verdict(commutator, p).verdict});
  return rows;
}

}  // namespace tmc
