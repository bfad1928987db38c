#pragma once

// Holomorphic functional calculus on finite matrices by trapezoidal quadrature
// of the resolvent over circles, with checks of the resolvent commutator
// identity and of the calculus in a corner pAp.

#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "tmclab/schatten.hpp"

namespace tmc {

using HoloFunction = std::function<Complex(Complex)>;

struct Circle {
  Complex center{0.0, 0.0};
  double radius = 1.0;
  int nodes = 256;
};

// Centered at the centroid of the eigenvalues, radius 1.5 times their spread
// (at least 1).
Circle default_contour(const Eigen::MatrixXcd& s, int nodes = 256);

// f(S) = (2 pi i)^{-1} sum_k f(z_k) (z_k - S)^{-1} dz_k. Throws ContourHitsSpectrum
// when an eigenvalue lies within 1e-3 of the circle or outside it.
Eigen::MatrixXcd contour_calculus(const Eigen::MatrixXcd& s, const HoloFunction& f, const Circle& c);
// As above for eigenvalues inside the circle only; those outside must be at least
// 1e-3 away. The result is f applied on the enclosed spectral subspace and zero on the rest.
Eigen::MatrixXcd contour_calculus_partial(const Eigen::MatrixXcd& s, const HoloFunction& f, const Circle& c);

// exp(S) by scaling and squaring with a 30-term Taylor series.
Eigen::MatrixXcd exp_series(const Eigen::MatrixXcd& s);

// (z - S)^{-1}. Throws SingularResolvent when the reciprocal condition number is below 1e-13.
Eigen::MatrixXcd resolvent(const Eigen::MatrixXcd& s, Complex z);

struct ResolventCheck {
  // |[R, T] - R [S, T] R| / (|R|^2 |[S, T]|), Frobenius norms, R = (z - S)^{-1}
  double residual = 0.0;
};
ResolventCheck resolvent_commutator_check(const Eigen::MatrixXcd& s, const Eigen::MatrixXcd& t, Complex z);

struct CommutatorBound {
  double p = 1.0;
  double direct = 0.0;  // ||[f(S), T]||_p
  double bound = 0.0;   // (2 pi)^{-1} length max|f| max|R|^2 ||[S, T]||_p
};
// Trapezoidal estimate of the contour-integral bound on the commutator of f(S).
CommutatorBound contour_commutator_bound(const Eigen::MatrixXcd& s, const Eigen::MatrixXcd& t, const HoloFunction& f,
                                         const Circle& c, double p);

enum class CornerCase {
  ZeroEnclosed,    // f holomorphic on a disk holding 0 and the spectrum of the corner
  ZeroSeparated,   // f given near the corner spectrum only; g = 0 near 0
};

struct CornerCheck {
  CornerCase which = CornerCase::ZeroEnclosed;
  double calculus_residual = 0.0;   // |p f(b) p - Q f(Q* b Q) Q*|, max entry
  double resolvent_residual = 0.0;  // max over nodes of |(zp - b)^{-1}_corner - p (z - b)^{-1} p|
};

// For a projection p and b = pbp: compares the calculus computed in the corner
// (on the range Q of p) with the compression of the ambient calculus. In the
// separated case the ambient side uses a contour around the corner spectrum
// only, which realizes g = f there and g = 0 near 0.
CornerCheck corner_calculus_check(const Eigen::MatrixXcd& p, const Eigen::MatrixXcd& b, const HoloFunction& f,
                                  const Circle& c, CornerCase which);

}  // namespace tmc
