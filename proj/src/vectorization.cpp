#include "liou/vectorization.hpp"

#include "liou/qm.hpp"

namespace liou {

SuperKet mho(const Matrix& x) {
  if (x.rows() != x.cols() || x.rows() == 0)
    throw ShapeMismatch("mho: operator must be square and nonempty");
  const int d = static_cast<int>(x.rows());
  Vector v(static_cast<Eigen::Index>(d) * d);
  for (int nu = 0; nu < d; ++nu)
    for (int nup = 0; nup < d; ++nup) v(static_cast<Eigen::Index>(nu) * d + nup) = x(nu, nup);
  return SuperKet(d, std::move(v));
}

Matrix mho_inv(const SuperKet& v) {
  const int d = v.dim;
  Matrix x(d, d);
  for (int nu = 0; nu < d; ++nu)
    for (int nup = 0; nup < d; ++nup) x(nu, nup) = v.entries(static_cast<Eigen::Index>(nu) * d + nup);
  return x;
}

SuperKet superket_basis(int nu, int nup, int d) {
  if (d <= 0) throw ShapeMismatch("superket_basis: dimension must be positive");
  if (nu < 0 || nu >= d || nup < 0 || nup >= d)
    throw DomainError("superket_basis: index out of range for dimension " + std::to_string(d));
  Vector v = Vector::Zero(static_cast<Eigen::Index>(d) * d);
  v(static_cast<Eigen::Index>(nu) * d + nup) = 1.0;
  return SuperKet(d, std::move(v));
}

SuperOp triple_superop(const Matrix& a, const Matrix& c) {
  if (a.rows() != a.cols() || c.rows() != c.cols() || a.rows() != c.rows())
    throw ShapeMismatch("triple_superop: operators must be square and of equal dimension");
  return SuperOp(static_cast<int>(a.rows()), kron(a, c.transpose()));
}

SuperOp super_comm(const Matrix& x, const Matrix& y) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
    throw ShapeMismatch("super_comm: operators must be square and of equal dimension");
  return SuperOp(static_cast<int>(x.rows()),
                 kron(x, y.transpose()) - kron(y, x.transpose()));
}

SuperOp super_acomm(const Matrix& x, const Matrix& y) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
    throw ShapeMismatch("super_acomm: operators must be square and of equal dimension");
  return SuperOp(static_cast<int>(x.rows()),
                 kron(x, y.transpose()) + kron(y, x.transpose()));
}

SuperKet vectorize_product(const Matrix& a, const Matrix& b) { return mho(kron(a, b)); }

Vector to_column_stacked(const SuperKet& v) {
  // Column stacking of X equals row stacking of X^T.
  return mho(mho_inv(v).transpose()).entries;
}

SuperKet from_column_stacked(int d, const Vector& col) {
  return mho(mho_inv(SuperKet(d, col)).transpose());
}

}  // namespace liou
