#pragma once

// Inflated representations on H (x) l^2(window), the commutators of the
// extension generators, Fredholm modules built from exact projections and
// permutation unitaries, and p-summability tables.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "tmclab/block_spectra.hpp"

namespace tmc {

// Block (row n, column n') of an operator on H (x) l^2({n_min..n_max}); the
// blocks share one basis registry.
struct InflatedOperator {
  Index n_min = 0, n_max = -1;
  std::map<std::pair<Index, Index>, SparseOperator> blocks;
  bool in_window(Index n) const { return n_min <= n && n <= n_max; }
};

InflatedOperator operator*(const InflatedOperator& a, const InflatedOperator& b);
InflatedOperator operator-(const InflatedOperator& a, const InflatedOperator& b);
// Keeps the columns of index < ncols in every block.
InflatedOperator restrict_columns(const InflatedOperator& a, std::size_t ncols);

// rho_s(f u^j) = sum_n alpha^n(f) (x) e_{n, n+j}, truncated to the window. With
// B e_n = e_{n-1}, rho_s(u) = 1 (x) B. Columns are the points present on entry.
InflatedOperator inflate_stable(const Function& f, Index j, Index n_min, Index n_max, BasisRegistry& basis);
// rho_u(g u^{j'}) = sum_m g u^{j'} (x) e_{m+j', m}: rho_u(g) = g (x) 1, rho_u(u) = u (x) B*.
InflatedOperator inflate_unstable(const Function& g, Index j, Index n_min, Index n_max, BasisRegistry& basis);

struct KpwCommutator {
  Index margin = 1;                 // max(|j|, |j'|) + 1
  std::vector<Index> rows;          // interior row blocks n that were computed
  std::vector<Index> excluded;      // window rows dropped at the edges
  std::map<Index, SparseOperator> blocks;  // row block n -> block (n, n + j - j')
  SingularSpectrum spectrum;
  SingularSpectrum reference;       // spectrum of [rho_s(a), rho_u(b)] on the same rows
  double spectrum_gap = 0.0;        // max deviation between the two, relative to the largest value
};

// Inserts the support columns of [alpha^n(a), b] for n in the window together
// with their images under phi^{-j'}, so that kpw_commutator sees whole blocks.
void seed_kpw_basis(const TransitionMatrix& m, const Function& a, const Function& b, Index n_min, Index n_max,
                    Index jp, BasisRegistry& basis);
// [rho_s(a u^j), rho_u(b u^{j'})] on the columns present on entry, restricted to
// interior rows n (n, n+j, n-j' and n+j-j' in the window, margin away from the edges).
KpwCommutator kpw_commutator(const Function& a, Index j, const Function& b, Index jp,
                             Index n_min, Index n_max, BasisRegistry& basis);

// ------------------------------------------------------------ Fredholm modules

enum class Parity { Odd, Even };

// A module over C on a finite-dimensional space: F and the representation of
// unstable functions (for even modules the representation is doubled).
struct FredholmModule {
  Parity parity = Parity::Odd;
  Eigen::MatrixXcd F;
  std::function<Eigen::MatrixXcd(const Function&)> rep;
  Eigen::Index dim() const { return F.rows(); }
};

// Adds the images of the basis under every term of fs and its inverse until
// nothing new appears. Returns false if the cap or the round limit stops it.
bool close_basis(const std::vector<Function>& fs, BasisRegistry& basis, int max_rounds = 64);
// rho(f) compressed to the current basis (square, dense).
Eigen::MatrixXcd dense_representation(const Function& f, const BasisRegistry& basis);

// F = 2e - 1 for an exact projection e. Throws NotAProjection.
FredholmModule make_odd_module(const Eigen::MatrixXcd& e, std::function<Eigen::MatrixXcd(const Function&)> rep);
// On H + H with rho + rho and F = [[0, W*], [W, 0]], W = v + 1 - p. Requires
// v*v = vv* = p and v = pvp to 1e-12. Throws NotCornerUnitary.
FredholmModule make_even_module(const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& p,
                                std::function<Eigen::MatrixXcd(const Function&)> rep);

struct SummabilityRow {
  std::string func_id;
  double p = 1.0;
  double q1 = 0.0;  // ||rho(a)(F* - F)||_p
  double q2 = 0.0;  // ||rho(a)(F^2 - 1)||_p
  double q3 = 0.0;  // ||[rho(a), F]||_p
  Verdict verdict = Verdict::Inconclusive;  // for the spectrum behind q3
};

std::vector<SummabilityRow> summability_report(const FredholmModule& mod,
                                               const std::vector<std::pair<std::string, Function>>& funcs,
                                               const std::vector<double>& p_grid);
// Commutator form: q3 is the p-norm of the merged block spectrum, q1 = q2 = 0.
std::vector<SummabilityRow> summability_report(const std::string& func_id, const SingularSpectrum& commutator,
                                               const std::vector<double>& p_grid);

}  // namespace tmc
