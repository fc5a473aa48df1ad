#include "liou/tls.hpp"

#include <cmath>

#include "liou/qm.hpp"

namespace liou {

TLSParams TLSParams::from_nbar(double omega0, double gamma0, double nbar, double Omega) {
  TLSParams p;
  p.omega0 = omega0;
  p.gamma0 = gamma0;
  p.nbar = nbar;
  p.Omega = Omega;
  p.validate();
  return p;
}

TLSParams TLSParams::from_beta(double omega0, double gamma0, double beta, double Omega) {
  TLSParams p;
  p.omega0 = omega0;
  p.gamma0 = gamma0;
  p.nbar = planck_nbar(omega0, beta);
  p.Omega = Omega;
  p.beta = beta;
  p.validate();
  return p;
}

void TLSParams::validate() const {
  if (!(omega0 > 0.0)) throw DomainError("TLSParams: omega0 must be positive");
  if (!(gamma0 > 0.0)) throw DomainError("TLSParams: gamma0 must be positive");
  if (!(nbar >= 0.0)) throw DomainError("TLSParams: nbar must be nonnegative");
  if (!std::isfinite(Omega)) throw DomainError("TLSParams: Omega must be finite");
}

double planck_nbar(double omega0, double beta) {
  if (!(beta * omega0 > 0.0))
    throw DomainError("planck_nbar: beta * omega0 must be positive");
  return 1.0 / std::expm1(beta * omega0);
}

std::pair<Liouvillian, Liouvillian> build_generators(const TLSParams& p) {
  p.validate();
  const double d = p.Delta();
  const double g1 = p.Gamma1();
  const double g2 = p.Gamma2();
  const double g = p.Gamma();

  Matrix la = Matrix::Zero(4, 4);
  la(1, 1) = Cplx(0, -d);
  la(2, 2) = Cplx(0, d);

  Matrix lb = Matrix::Zero(4, 4);
  lb(0, 0) = -g1;
  lb(0, 3) = g2;
  lb(1, 1) = -g / 2.0;
  lb(2, 2) = -g / 2.0;
  lb(3, 0) = g1;
  lb(3, 3) = -g2;

  return {Liouvillian{SuperOp(2, std::move(la)), LiouvKind::unitary},
          Liouvillian{SuperOp(2, std::move(lb)), LiouvKind::dissipative}};
}

DensityMatrix closed_form_rho(const TLSParams& p, const DensityMatrix& rho0, double t) {
  if (rho0.dim() != 2) throw ShapeMismatch("closed_form_rho: state must be 2x2");
  const double g = p.Gamma();
  const double eq_e = p.Gamma2() / g;  // excited-state equilibrium population
  const double decay = std::exp(-g * t);
  const Cplx coh = std::exp(Cplx(-g * t / 2.0, -p.Delta() * t));

  const Matrix& r0 = rho0.op();
  Matrix r(2, 2);
  r(0, 0) = eq_e + decay * (r0(0, 0) - eq_e);
  r(0, 1) = coh * r0(0, 1);
  r(1, 0) = std::conj(coh) * r0(1, 0);
  r(1, 1) = 1.0 - r(0, 0);
  return DensityMatrix::hermitized(r);
}

KrausSet closed_form_kraus(const TLSParams& p, double t, bool include_unitary) {
  if (t < 0.0) throw DomainError("closed_form_kraus: t must be nonnegative");
  const double g = p.Gamma();
  const double w1 = p.Gamma1() / g;
  const double w2 = p.Gamma2() / g;
  const double half = std::exp(-g * t / 2.0);
  const double ap = (1.0 + half) / 2.0;
  const double am = (1.0 - half) / 2.0;
  const double full = -std::expm1(-g * t);  // 1 - e^{-Gamma t}

  const Matrix id = identity(2);
  const Matrix sz = pauli_z();
  KrausSet set;
  set.dim = 2;
  set.time_tag = t;
  set.ops.push_back(std::sqrt(w1) * (ap * id - am * sz));
  set.ops.push_back(std::sqrt(w2) * (ap * id + am * sz));
  set.ops.push_back(std::sqrt(w1 * full) * sigma_minus());
  set.ops.push_back(std::sqrt(w2 * full) * sigma_plus());

  if (include_unitary) {
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = std::exp(Cplx(0, -p.Delta() * t / 2.0));
    u(1, 1) = std::exp(Cplx(0, p.Delta() * t / 2.0));
    for (Matrix& k : set.ops) k = u * k;
  }
  return set;
}

std::pair<double, double> equilibrium_populations(const TLSParams& p) {
  const double g = p.Gamma();
  return {p.Gamma1() / g, p.Gamma2() / g};
}

}  // namespace liou
