#pragma once

#include "liou/types.hpp"

namespace liou {

// Vectorization map: |a><b| -> |a> (x) |b>*, i.e. row-major stacking where
// flat index nu*d + nu' holds X(nu, nu'). All superoperators in this library
// assume this layout; the column-stacking convention is available only via
// the explicit conversion helpers at the bottom.
SuperKet mho(const Matrix& x);

// Exact inverse of mho.
Matrix mho_inv(const SuperKet& v);

// Standard basis superket |nu, nu'>> with a single 1 at flat index nu*d + nu'.
SuperKet superket_basis(int nu, int nup, int d);

// The superoperator A (x) C^T, which satisfies
//   triple_superop(A, C) * mho(B) = mho(A * B * C)  for every B.
SuperOp triple_superop(const Matrix& a, const Matrix& c);

// Super-commutator  [[X, Y]] = X (x) Y^T - Y (x) X^T.
// mho([X, B]) = super_comm(X, I) * mho(B).
SuperOp super_comm(const Matrix& x, const Matrix& y);

// Super-anticommutator  [[X, Y]]_+ = X (x) Y^T + Y (x) X^T.
SuperOp super_acomm(const Matrix& x, const Matrix& y);

// Vectorization of a composite-system operator: mho(A (x) B). Component
// (nu mu, nu' mu') factorizes as <<nu,nu'|A>> * <<mu,mu'|B>>.
SuperKet vectorize_product(const Matrix& a, const Matrix& b);

// Conversion to/from the column-stacking convention (columns concatenated
// top to bottom); provided for interoperability only.
Vector to_column_stacked(const SuperKet& v);
SuperKet from_column_stacked(int d, const Vector& col);

}  // namespace liou
