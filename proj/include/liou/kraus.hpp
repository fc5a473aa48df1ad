#pragma once

#include <optional>
#include <vector>

#include "liou/types.hpp"

namespace liou {

using ChoiMatrix = Matrix;

// Operator-sum representation of a channel: rho -> sum K rho K^dag.
struct KrausSet {
  std::vector<Matrix> ops;
  int dim = 0;
  std::optional<double> time_tag;  // the t of exp(tL) when known
};

// Index permutation R(S)_{(nu nu'),(nu'' nu''')} = S_{(nu nu''),(nu' nu''')}
// in the row-major flat layout. Involution: reshuffling twice returns S.
// Maps sum_a K_a (x) K_a* to the positive matrix sum_a mho(K_a) mho(K_a)^dag.
ChoiMatrix choi_reshuffle(const Matrix& s);
ChoiMatrix choi_reshuffle(const SuperOp& s);

// Kraus extraction by Hermitian eigendecomposition of the reshuffle:
// keep eigenpairs with weight > tol (default 1e-10 * largest weight),
// K_i = sqrt(w_i) * mho_inv(v_i). Throws NotHermitianChoi when the reshuffle
// is not Hermitian within 1e-8, NotCompletelyPositive when some weight is
// below -100*tol. Each K's global phase is fixed by making its
// largest-magnitude entry real positive; output is sorted by descending
// weight, and at most d^2 operators are returned.
KrausSet kraus_from_superop(const SuperOp& s, double tol = -1.0);

// sum K rho K^dag, Hermitized before validation.
DensityMatrix apply_kraus(const KrausSet& set, const DensityMatrix& rho);

// ||sum K^dag K - I||_max.
double completeness_defect(const KrausSet& set);

// sum K (x) conj(K).
SuperOp channel_superop(const KrausSet& set);

// Gauge-invariant channel comparison: ||S1 - S2||_max <= tol.
bool channels_equal(const SuperOp& s1, const SuperOp& s2, double tol);

}  // namespace liou
