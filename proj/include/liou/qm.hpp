#pragma once

#include "liou/types.hpp"

namespace liou {

// Conjugate transpose.
inline Matrix dagger(const Matrix& x) { return x.adjoint(); }

// Extended Hilbert-Schmidt inner product <A, B> = Tr[B * dagger(A)].
// The order matters: the first argument is the conjugated one.
Cplx hs_inner(const Matrix& a, const Matrix& b);

// Tr[rho^2]; equals 1 exactly for pure states, 1/d for maximally mixed.
double purity(const DensityMatrix& rho);

// Tr[B * rho].
Cplx expectation(const DensityMatrix& rho, const Matrix& b);

// p(m) = Tr[dagger(M) M rho], clamped into [0, 1] when the excursion is
// within +-1e-12 (roundoff); genuine violations pass through unclamped.
double measure_prob(const DensityMatrix& rho, const Matrix& m);

// rho -> sum_m M_m rho dagger(M_m). Requires the completeness defect of the
// set to be at most 1e-8, else throws IncompleteMeasurementSet.
DensityMatrix nonselective_update(const DensityMatrix& rho, const MeasurementSet& set);

// Matrix exponential e^A (scaling-and-squaring with a rational core).
Matrix expm(const Matrix& a);
SuperOp expm(const SuperOp& s);

// Kronecker product: the (m*m') x (n*n') block matrix [x_ij * Y].
Matrix kron(const Matrix& x, const Matrix& y);

// --- fixed 2x2 operators in the (e, g) basis, e first --------------------

inline Matrix identity(int d) { return Matrix::Identity(d, d); }

inline Matrix pauli_x() {
  Matrix s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

inline Matrix pauli_y() {
  Matrix s(2, 2);
  s << 0, Cplx(0, -1), Cplx(0, 1), 0;
  return s;
}

inline Matrix pauli_z() {
  Matrix s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

// Raising operator |e><g|.
inline Matrix sigma_plus() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 1) = 1;
  return s;
}

// Lowering operator |g><e|.
inline Matrix sigma_minus() {
  Matrix s = Matrix::Zero(2, 2);
  s(1, 0) = 1;
  return s;
}

}  // namespace liou
