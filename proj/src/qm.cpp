#include "liou/qm.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace liou {

Cplx hs_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw ShapeMismatch("hs_inner: operators must be square and of equal dimension");
  // Tr[B A^dag] = sum_ik B_ik conj(A_ik); no product needed.
  return (b.array() * a.array().conjugate()).sum();
}

double purity(const DensityMatrix& rho) {
  const Matrix& r = rho.op();
  return (r * r).trace().real();
}

Cplx expectation(const DensityMatrix& rho, const Matrix& b) {
  if (b.rows() != rho.dim() || b.cols() != rho.dim())
    throw ShapeMismatch("expectation: observable dimension does not match the state");
  return (b * rho.op()).trace();
}

double measure_prob(const DensityMatrix& rho, const Matrix& m) {
  if (m.rows() != rho.dim() || m.cols() != rho.dim())
    throw ShapeMismatch("measure_prob: measurement operator dimension does not match the state");
  const double p = (m.adjoint() * m * rho.op()).trace().real();
  constexpr double window = 1e-12;
  if (p < 0.0 && p >= -window) return 0.0;
  if (p > 1.0 && p <= 1.0 + window) return 1.0;
  return p;
}

DensityMatrix nonselective_update(const DensityMatrix& rho, const MeasurementSet& set) {
  const double defect = set.completeness_defect();
  if (defect > 1e-8) throw IncompleteMeasurementSet(defect);
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (const Matrix& m : set.ops) {
    if (m.rows() != rho.dim())
      throw ShapeMismatch("nonselective_update: operator dimension does not match the state");
    out += m * rho.op() * m.adjoint();
  }
  return DensityMatrix::hermitized(out);
}

Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeMismatch("expm: input must be square");
  if (!a.allFinite()) throw NonFiniteInput("expm: non-finite entries");
  return a.exp();
}

SuperOp expm(const SuperOp& s) { return SuperOp(s.dim, expm(s.entries)); }

Matrix kron(const Matrix& x, const Matrix& y) {
  if (!x.allFinite() || !y.allFinite()) throw NonFiniteInput("kron: non-finite entries");
  return Eigen::kroneckerProduct(x, y);
}

}  // namespace liou
