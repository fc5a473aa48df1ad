#include "liou/generators.hpp"

#include "liou/qm.hpp"
#include "liou/vectorization.hpp"

namespace liou {

namespace {
constexpr double kHermTol = 1e-10;
}

void LindbladModel::validate() const {
  if (H.rows() != H.cols() || H.rows() == 0)
    throw ShapeMismatch("LindbladModel: H must be square and nonempty");
  if (!H.allFinite()) throw NonFiniteInput("LindbladModel: H has non-finite entries");
  if (hermiticity_defect(H) > kHermTol)
    throw NonHermitianHamiltonian("LindbladModel: H Hermiticity defect " +
                                  std::to_string(hermiticity_defect(H)));
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const Jump& j = jumps[k];
    if (!(j.rate >= 0.0))
      throw DomainError("LindbladModel: jump " + std::to_string(k) + " has negative rate");
    if (j.op.rows() != H.rows() || j.op.cols() != H.cols())
      throw ShapeMismatch("LindbladModel: jump " + std::to_string(k) +
                          " operator dimension does not match H");
    if (!j.op.allFinite())
      throw NonFiniteInput("LindbladModel: jump " + std::to_string(k) + " has non-finite entries");
  }
}

Liouvillian operator+(const Liouvillian& a, const Liouvillian& b) {
  const LiouvKind kind = (a.kind == LiouvKind::unitary && b.kind == LiouvKind::unitary)
                             ? LiouvKind::unitary
                             : LiouvKind::combined;
  return Liouvillian{a.op + b.op, kind};
}

Liouvillian operator*(double c, const Liouvillian& l) {
  if (c < 0.0) throw DomainError("Liouvillian scaling: factor must be nonnegative");
  return Liouvillian{SuperOp(l.op.dim, c * l.op.entries), l.kind};
}

Liouvillian unitary_liouvillian(const Matrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0)
    throw ShapeMismatch("unitary_liouvillian: H must be square and nonempty");
  const double defect = hermiticity_defect(h);
  if (defect > kHermTol)
    throw NonHermitianHamiltonian("unitary_liouvillian: H Hermiticity defect " +
                                  std::to_string(defect));
  SuperOp c = super_comm(h, identity(static_cast<int>(h.rows())));
  return Liouvillian{SuperOp(c.dim, Cplx(0, -1) * c.entries), LiouvKind::unitary};
}

Liouvillian lindblad_liouvillian(const LindbladModel& model) {
  model.validate();
  const int d = model.dim();
  bool any_jump = false;
  Matrix acc = Matrix::Zero(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
  for (const Jump& j : model.jumps) {
    if (j.rate == 0.0) continue;
    any_jump = true;
    const Matrix adag_a = j.op.adjoint() * j.op;
    acc += j.rate * (kron(j.op, j.op.conjugate()) -
                     0.5 * super_acomm(adag_a, identity(d)).entries);
  }
  const bool h_zero = max_abs(model.H) == 0.0;
  if (!any_jump) return unitary_liouvillian(model.H);
  if (h_zero) return Liouvillian{SuperOp(d, std::move(acc)), LiouvKind::dissipative};
  acc += unitary_liouvillian(model.H).op.entries;
  return Liouvillian{SuperOp(d, std::move(acc)), LiouvKind::combined};
}

namespace {
void check_indices(int d, int nu, int nup, int nupp, int nuppp) {
  auto ok = [d](int i) { return i >= 0 && i < d; };
  if (!ok(nu) || !ok(nup) || !ok(nupp) || !ok(nuppp))
    throw DomainError("matrix_element: index out of range for dimension " + std::to_string(d));
}
}  // namespace

Cplx matrix_element(const Liouvillian& l, int nu, int nup, int nupp, int nuppp) {
  const int d = l.op.dim;
  check_indices(d, nu, nup, nupp, nuppp);
  return l.op.entries(static_cast<Eigen::Index>(nu) * d + nup,
                      static_cast<Eigen::Index>(nupp) * d + nuppp);
}

Cplx unitary_matrix_element(const Matrix& h, int nu, int nup, int nupp, int nuppp) {
  const int d = static_cast<int>(h.rows());
  check_indices(d, nu, nup, nupp, nuppp);
  const Cplx term1 = (nup == nuppp) ? h(nu, nupp) : Cplx(0, 0);
  const Cplx term2 = (nu == nupp) ? std::conj(h(nup, nuppp)) : Cplx(0, 0);
  return Cplx(0, -1) * (term1 - term2);
}

}  // namespace liou
