#include "tmclab/calculus.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "tmclab/errors.hpp"

namespace tmc {

namespace {

constexpr double kClearance = 1e-3;

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXcd& s) {
  if (s.rows() != s.cols()) throw Error(Errc::InvalidInput, "matrix must be square");
  return Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(s, false).eigenvalues();
}

// Inside-flags of the eigenvalues; throws if one sits within the clearance of the circle.
std::vector<bool> classify(const Eigen::VectorXcd& ev, const Circle& c) {
  if (c.radius <= 0 || c.nodes < 3) throw Error(Errc::InvalidInput, "contour needs radius > 0 and at least 3 nodes");
  std::vector<bool> inside;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double d = std::abs(ev(i) - c.center);
    if (std::abs(d - c.radius) < kClearance)
      throw Error(Errc::ContourHitsSpectrum, "eigenvalue within 1e-3 of the contour");
    inside.push_back(d < c.radius);
  }
  return inside;
}

Eigen::MatrixXcd quadrature(const Eigen::MatrixXcd& s, const HoloFunction& f, const Circle& c) {
  const Eigen::Index d = s.rows();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k < c.nodes; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / c.nodes;
    const Complex e = std::polar(1.0, theta);
    const Complex z = c.center + c.radius * e;
    // dz / (2 pi i) = r e^{i theta} / M
    acc += (f(z) * c.radius * e / static_cast<double>(c.nodes)) * resolvent(s, z);
  }
  return acc;
}

double max_abs(const Eigen::MatrixXcd& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace

Circle default_contour(const Eigen::MatrixXcd& s, int nodes) {
  const Eigen::VectorXcd ev = eigenvalues(s);
  Circle c;
  c.nodes = nodes;
  if (ev.size() == 0) return c;
  c.center = ev.mean();
  double spread = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) spread = std::max(spread, std::abs(ev(i) - c.center));
  c.radius = std::max(1.0, 1.5 * spread);
  return c;
}

Eigen::MatrixXcd contour_calculus(const Eigen::MatrixXcd& s, const HoloFunction& f, const Circle& c) {
  for (bool in : classify(eigenvalues(s), c))
    if (!in) throw Error(Errc::ContourHitsSpectrum, "contour does not enclose the spectrum");
  return quadrature(s, f, c);
}

Eigen::MatrixXcd contour_calculus_partial(const Eigen::MatrixXcd& s, const HoloFunction& f, const Circle& c) {
  classify(eigenvalues(s), c);
  return quadrature(s, f, c);
}

Eigen::MatrixXcd exp_series(const Eigen::MatrixXcd& s) {
  const double norm = s.size() == 0 ? 0.0 : s.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (std::ldexp(norm, -squarings) > 0.5) ++squarings;
  const Eigen::MatrixXcd a = s * std::ldexp(1.0, -squarings);
  const Eigen::Index d = s.rows();
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(d, d), sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

Eigen::MatrixXcd resolvent(const Eigen::MatrixXcd& s, Complex z) {
  const Eigen::Index d = s.rows();
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(z * Eigen::MatrixXcd::Identity(d, d) - s);
  if (d > 0) {
    const Eigen::VectorXd piv = lu.matrixLU().diagonal().cwiseAbs();
    if (!(lu.rcond() >= 1e-13) || !(piv.minCoeff() > 1e-13 * piv.maxCoeff()))
      throw Error(Errc::SingularResolvent, "z - S is numerically singular");
  }
  return lu.inverse();
}

ResolventCheck resolvent_commutator_check(const Eigen::MatrixXcd& s, const Eigen::MatrixXcd& t, Complex z) {
  const Eigen::MatrixXcd r = resolvent(s, z);
  const Eigen::MatrixXcd st = s * t - t * s;
  const Eigen::MatrixXcd lhs = r * t - t * r, rhs = r * st * r;
  const double scale = r.norm() * r.norm() * st.norm();
  ResolventCheck out;
  out.residual = scale > 0 ? (lhs - rhs).norm() / scale : (lhs - rhs).norm();
  return out;
}

CommutatorBound contour_commutator_bound(const Eigen::MatrixXcd& s, const Eigen::MatrixXcd& t, const HoloFunction& f,
                                         const Circle& c, double p) {
  const Eigen::MatrixXcd fs = contour_calculus(s, f, c);
  CommutatorBound out;
  out.p = p;
  out.direct = schatten_norm(singular_values(Eigen::MatrixXcd(fs * t - t * fs)), p);
  double fmax = 0.0, rmax = 0.0;
  for (int k = 0; k < c.nodes; ++k) {
    const Complex z = c.center + std::polar(c.radius, 2.0 * std::numbers::pi * k / c.nodes);
    fmax = std::max(fmax, std::abs(f(z)));
    rmax = std::max(rmax, singular_values(resolvent(s, z)).largest());
  }
  const double st = schatten_norm(singular_values(Eigen::MatrixXcd(s * t - t * s)), p);
  out.bound = c.radius * fmax * rmax * rmax * st;  // length / (2 pi) = radius
  return out;
}

CornerCheck corner_calculus_check(const Eigen::MatrixXcd& p, const Eigen::MatrixXcd& b, const HoloFunction& f,
                                  const Circle& c, CornerCase which) {
  if (p.rows() != p.cols() || b.rows() != p.rows()) throw Error(Errc::InvalidInput, "p and b must be square of equal size");
  if (max_abs(p - p.adjoint()) > 1e-12 || max_abs(p * p - p) > 1e-12)
    throw Error(Errc::NotAProjection, "p is not a projection");
  if (max_abs(p * b * p - b) > 1e-12) throw Error(Errc::InvalidInput, "b must satisfy b = pbp");
  // orthonormal basis Q of the range of p
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(p);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
  Eigen::MatrixXcd q(p.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) q.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
  const Eigen::MatrixXcd bc = q.adjoint() * b * q;

  CornerCheck out;
  out.which = which;
  const Eigen::MatrixXcd corner = q * contour_calculus(bc, f, c) * q.adjoint();
  if (which == CornerCase::ZeroSeparated && std::abs(c.center) < c.radius + kClearance)
    throw Error(Errc::ContourHitsSpectrum, "the separated case needs 0 outside the contour");
  const Eigen::MatrixXcd ambient =
      which == CornerCase::ZeroEnclosed ? contour_calculus(b, f, c) : contour_calculus_partial(b, f, c);
  out.calculus_residual = max_abs(p * ambient * p - corner);
  for (int k = 0; k < c.nodes; ++k) {
    const Complex z = c.center + std::polar(c.radius, 2.0 * std::numbers::pi * k / c.nodes);
    const Eigen::MatrixXcd rc = q * resolvent(bc, z) * q.adjoint();
    out.resolvent_residual = std::max(out.resolvent_residual, max_abs(p * resolvent(b, z) * p - rc));
  }
  return out;
}

}  // namespace tmc
