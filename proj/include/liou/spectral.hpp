#pragma once

#include <functional>
#include <vector>

#include "liou/generators.hpp"
#include "liou/types.hpp"

namespace liou {

enum class SpectralClass { skew_hermitian, diagonalizable, defective };

// One Jordan block. right[m-1] is the rank-m generalized eigenvector:
// (M - lambda) * right[m-1] = right[m-2], and right[0] is a proper
// eigenvector. left[m-1] is the dual row at the same basis position (a row
// of the inverse basis matrix), stored unconjugated: the rank-m coefficient
// of a vector x is left[m-1].transpose() * x.
struct JordanChain {
  Cplx lambda;
  std::vector<Vector> right;
  std::vector<Vector> left;
};

struct SpectralSystem {
  SpectralClass klass = SpectralClass::diagonalizable;
  int size = 0;  // matrix dimension n
  int dim = 0;   // state-space d when the system came from a Liouvillian (n = d^2), else 0
  Vector eigenvalues;  // length n, one per basis column (repeated across a Jordan block)
  Matrix right;        // columns: (generalized) right eigenvectors
  Matrix left;         // rows: dual basis; right * left = I (left = right^dag for the skew class)
  std::vector<JordanChain> chains;  // defective class only, in basis-column order
  double residual = 0.0;            // max reconstruction / chain-relation residual
  double tol_cluster_used = 0.0;
  double tol_diag_used = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
};

// Classify and decompose a square generator matrix:
//   - skew_hermitian when ||M + M^dag||_max <= tol_cluster: orthonormal eigenbasis;
//   - diagonalizable when the eigenvector matrix is numerically invertible
//     (smallest singular value > tol_diag, default n*eps*sigma_max): left
//     vectors are the rows of the inverse;
//   - defective otherwise: Jordan chains from nullspaces of (M - lambda I)^m,
//     restricted to n <= 16.
// Negative tolerances select the defaults: tol_cluster = max(1e-10, 1e-8*||M||_F),
// tol_diag as above.
SpectralSystem analyze_matrix(const Matrix& m, double tol_cluster = -1.0, double tol_diag = -1.0);
SpectralSystem analyze(const Liouvillian& l, double tol_cluster = -1.0, double tol_diag = -1.0);

// exp(t M) assembled from the decomposition (diagonal or Jordan-block form).
Matrix propagator(const SpectralSystem& sys, double t);

// Spectral-expansion propagation of a state through exp(tL). Each state is
// mapped back to operator form and Hermitized before validation. The optional
// tolerances are forwarded to analyze().
Trajectory propagate(const Liouvillian& l, const DensityMatrix& rho0,
                     const std::vector<double>& times, double tol_cluster = -1.0,
                     double tol_diag = -1.0);

// Independent path used as a cross-check: expm(tL) applied to mho(rho0).
DensityMatrix propagate_expm_oracle(const Liouvillian& l, const DensityMatrix& rho0, double t);

// The trace-normalized zero-mode. Throws Unstable when some Re(lambda)
// exceeds tol_stab (or a zero-real eigenvalue is defective), and
// NonUniqueSteadyState (with the zero-real eigenvector basis attached) when
// the stationary direction is not unique.
DensityMatrix steady_state(const SpectralSystem& sys, double tol_stab = 1e-8,
                           double tol_zero = 1e-8);

struct ZeroMode {
  Cplx lambda;
  int algebraic = 0;
  int geometric = 0;
  int max_chain_len = 0;
  bool defective = false;  // algebraic > geometric: polynomial growth at Re = 0
};

struct StabilityReport {
  double max_real = 0.0;
  bool stable = false;  // max_real <= tol_stab
  double tol_stab = 0.0;
  double tol_zero = 0.0;
  std::vector<ZeroMode> zero_modes;     // eigenvalues with |Re| <= tol_zero
  bool any_defective_zero_mode = false;
  bool any_degenerate_zero_mode = false;  // geometric multiplicity > 1
};

StabilityReport stability_report(const SpectralSystem& sys, double tol_stab = 1e-8,
                                 double tol_zero = 1e-8);

// U(t)^dag * mho(A) with U(t) = expm(tL); requires a unitary-kind generator.
// Satisfies the pairing <<rho(t)|A>> = <<rho(0)|A_H(t)>>.
SuperKet heisenberg_superket(const Liouvillian& l, const Matrix& a, double t);

// Truncated time-ordered expansion in the interaction frame of L0:
//   U(t) ~ U0(t) * [ I + Int L'_I + Int Int L'_I L'_I + ... ]   (up to `order`),
// with L'_I(s) = expm(-sL0) * L'(s) * expm(sL0) and every iterated integral
// evaluated by composite trapezoid on `steps` uniform intervals.
// residual_estimate (optional) receives a crude magnitude estimate of the
// first omitted term.
SuperOp dyson_propagator(const Liouvillian& l0, const std::function<SuperOp(double)>& lprime,
                         double t, int order, int steps, double* residual_estimate = nullptr);

}  // namespace liou
