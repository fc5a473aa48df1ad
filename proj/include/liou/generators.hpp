#pragma once

#include <vector>

#include "liou/types.hpp"

namespace liou {

// One dissipative channel: rate gamma >= 0 and jump operator A.
struct Jump {
  double rate = 0.0;
  Matrix op;
};

// H in angular-frequency units (hbar = 1), plus any number of jump terms.
struct LindbladModel {
  Matrix H;
  std::vector<Jump> jumps;

  // Throws on: non-square or non-Hermitian H, negative rate, mixed dims.
  void validate() const;
  int dim() const { return static_cast<int>(H.rows()); }
};

enum class LiouvKind { unitary, dissipative, combined };

// Generator of density-matrix dynamics, d/dt |rho>> = L |rho>>.
struct Liouvillian {
  SuperOp op;
  LiouvKind kind = LiouvKind::combined;
};

// Sum of generators; the result is unitary-kind only if both parts are.
Liouvillian operator+(const Liouvillian& a, const Liouvillian& b);
// Scaling by a nonnegative real factor preserves the kind.
Liouvillian operator*(double c, const Liouvillian& l);

// L = -i (H (x) I - I (x) H^T). Skew-Hermitian, singular, zero trace.
Liouvillian unitary_liouvillian(const Matrix& h);

// Full generator:
//   L = -i [[H, I]] + sum_k gamma_k ( A_k (x) A_k* - 1/2 [[A_k^dag A_k, I]]_+ ).
// Zero-rate jumps are skipped. The left identity row is preserved:
// <<I| L = 0, so the flow is trace preserving.
Liouvillian lindblad_liouvillian(const LindbladModel& model);

// Direct entry lookup at flat row nu*d + nu', column nu''*d + nu'''.
Cplx matrix_element(const Liouvillian& l, int nu, int nup, int nupp, int nuppp);

// Closed form for the unitary generator built from H:
//   -i ( H(nu, nu'') delta(nu', nu''') - delta(nu, nu'') conj(H(nu', nu''')) ).
Cplx unitary_matrix_element(const Matrix& h, int nu, int nup, int nupp, int nuppp);

}  // namespace liou
