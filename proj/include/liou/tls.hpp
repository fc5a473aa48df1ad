#pragma once

#include <optional>
#include <utility>

#include "liou/generators.hpp"
#include "liou/kraus.hpp"
#include "liou/types.hpp"

namespace liou {

// Two-level emitter coupled to a thermal photon field, hbar = 1.
// Basis order everywhere: (ee, eg, ge, gg) with |e> the first basis vector.
// Derived rates: Gamma1 = gamma0 (1 + nbar)  (emission),
//                Gamma2 = gamma0 nbar        (absorption),
//                Gamma  = Gamma1 + Gamma2 = gamma0 (2 nbar + 1),
// and detuning Delta = omega0 - Omega (Omega: level-shift magnitude, default 0).
struct TLSParams {
  double omega0 = 0.0;
  double gamma0 = 0.0;
  double nbar = 0.0;
  double Omega = 0.0;
  std::optional<double> beta;  // inverse temperature when nbar came from it

  static TLSParams from_nbar(double omega0, double gamma0, double nbar, double Omega = 0.0);
  static TLSParams from_beta(double omega0, double gamma0, double beta, double Omega = 0.0);

  double Gamma1() const { return gamma0 * (1.0 + nbar); }
  double Gamma2() const { return gamma0 * nbar; }
  double Gamma() const { return Gamma1() + Gamma2(); }
  double Delta() const { return omega0 - Omega; }

  void validate() const;  // omega0 > 0, gamma0 > 0, nbar >= 0
};

// Mean photon number of a thermal mode: 1 / (e^{beta omega0} - 1).
double planck_nbar(double omega0, double beta);

// (La, Lb): the unitary part La = diag(0, -i Delta, i Delta, 0) and the
// dissipator Lb, both written out entrywise as a route independent of the
// generators module (which assembles them via Kronecker products). The two
// generators commute.
std::pair<Liouvillian, Liouvillian> build_generators(const TLSParams& p);

// Exact solution of the full master equation:
//   rho_ee(t) = Gamma2/Gamma + e^{-Gamma t} (rho_ee(0) - Gamma2/Gamma),
//   rho_eg(t) = e^{-Gamma t/2 - i Delta t} rho_eg(0),
//   rho_ge(t) = e^{-Gamma t/2 + i Delta t} rho_ge(0).
DensityMatrix closed_form_rho(const TLSParams& p, const DensityMatrix& rho0, double t);

// The four closed-form Kraus operators of exp(t Lb); with include_unitary
// each is left-multiplied by e^{-i Delta t sigma_z / 2}. Completeness holds
// to machine precision for every t >= 0.
KrausSet closed_form_kraus(const TLSParams& p, double t, bool include_unitary);

// (ground, excited) = (Gamma1/Gamma, Gamma2/Gamma); equals the Gibbs weights
// of H = (omega0/2) sigma_z when nbar is thermal at the stored beta.
std::pair<double, double> equilibrium_populations(const TLSParams& p);

}  // namespace liou
