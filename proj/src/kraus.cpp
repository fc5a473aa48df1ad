#include "liou/kraus.hpp"

#include <algorithm>
#include <cmath>

#include "liou/qm.hpp"
#include "liou/vectorization.hpp"

namespace liou {

namespace {

int square_side(Eigen::Index n, const char* who) {
  const int d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n))));
  if (d <= 0 || static_cast<Eigen::Index>(d) * d != n)
    throw ShapeMismatch(std::string(who) + ": size " + std::to_string(n) +
                        " is not a perfect square");
  return d;
}

}  // namespace

ChoiMatrix choi_reshuffle(const Matrix& s) {
  if (s.rows() != s.cols()) throw ShapeMismatch("choi_reshuffle: matrix must be square");
  const int d = square_side(s.rows(), "choi_reshuffle");
  ChoiMatrix r(s.rows(), s.cols());
  for (int nu = 0; nu < d; ++nu)
    for (int nup = 0; nup < d; ++nup)
      for (int nupp = 0; nupp < d; ++nupp)
        for (int nuppp = 0; nuppp < d; ++nuppp)
          r(static_cast<Eigen::Index>(nu) * d + nup, static_cast<Eigen::Index>(nupp) * d + nuppp) =
              s(static_cast<Eigen::Index>(nu) * d + nupp,
                static_cast<Eigen::Index>(nup) * d + nuppp);
  return r;
}

ChoiMatrix choi_reshuffle(const SuperOp& s) { return choi_reshuffle(s.entries); }

KrausSet kraus_from_superop(const SuperOp& s, double tol) {
  const int d = s.dim;
  ChoiMatrix r = choi_reshuffle(s.entries);
  const double herm = hermiticity_defect(r);
  if (herm > 1e-8) throw NotHermitianChoi(herm);
  r = (r + r.adjoint()) / 2.0;

  Eigen::SelfAdjointEigenSolver<Matrix> es(r);
  if (es.info() != Eigen::Success) throw Error("kraus_from_superop: eigensolver failed");
  const Eigen::VectorXd w = es.eigenvalues();
  const double wmax = std::max(0.0, w.maxCoeff());
  const double cutoff = tol >= 0.0 ? tol : 1e-10 * wmax;
  const double wmin = w.minCoeff();
  if (wmin < -100.0 * std::max(cutoff, 1e-300)) throw NotCompletelyPositive(wmin);

  struct Pair {
    double w;
    Eigen::Index i;
  };
  std::vector<Pair> kept;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) > cutoff) kept.push_back({w(i), i});
  std::stable_sort(kept.begin(), kept.end(), [](const Pair& a, const Pair& b) { return a.w > b.w; });

  KrausSet set;
  set.dim = d;
  for (const Pair& p : kept) {
    Matrix k = std::sqrt(p.w) * mho_inv(SuperKet(d, es.eigenvectors().col(p.i)));
    // Deterministic gauge: rotate the largest-magnitude entry (first in a
    // row-major scan on ties) to the positive real axis.
    Eigen::Index bi = 0, bj = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < k.rows(); ++i)
      for (Eigen::Index j = 0; j < k.cols(); ++j) {
        const double mag = std::abs(k(i, j));
        if (mag > best) {
          best = mag;
          bi = i;
          bj = j;
        }
      }
    if (best > 0.0) k *= std::conj(k(bi, bj)) / best;
    set.ops.push_back(std::move(k));
  }
  return set;
}

DensityMatrix apply_kraus(const KrausSet& set, const DensityMatrix& rho) {
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (const Matrix& k : set.ops) {
    if (k.rows() != rho.dim() || k.cols() != rho.dim())
      throw ShapeMismatch("apply_kraus: operator dimension does not match the state");
    out += k * rho.op() * k.adjoint();
  }
  return DensityMatrix::hermitized(out);
}

double completeness_defect(const KrausSet& set) {
  if (set.ops.empty()) throw DomainError("completeness_defect: empty Kraus set");
  const Eigen::Index d = set.ops.front().rows();
  Matrix acc = Matrix::Zero(d, d);
  for (const Matrix& k : set.ops) {
    if (k.rows() != d || k.cols() != d)
      throw ShapeMismatch("completeness_defect: operators have mixed dimensions");
    acc += k.adjoint() * k;
  }
  return max_abs(Matrix(acc - Matrix::Identity(d, d)));
}

SuperOp channel_superop(const KrausSet& set) {
  if (set.ops.empty()) throw DomainError("channel_superop: empty Kraus set");
  const int d = static_cast<int>(set.ops.front().rows());
  Matrix acc = Matrix::Zero(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
  for (const Matrix& k : set.ops) {
    if (k.rows() != d || k.cols() != d)
      throw ShapeMismatch("channel_superop: operators have mixed dimensions");
    acc += kron(k, k.conjugate());
  }
  return SuperOp(d, std::move(acc));
}

bool channels_equal(const SuperOp& s1, const SuperOp& s2, double tol) {
  if (s1.dim != s2.dim)
    throw ShapeMismatch("channels_equal: superoperator sizes differ");
  return max_abs(Matrix(s1.entries - s2.entries)) <= tol;
}

}  // namespace liou
