#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace liou {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Errors. Every throwing path in the library uses one of these so the CLI can
// map failures to stable exit codes.
// ---------------------------------------------------------------------------

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sizes of two inputs (or a field and its declared dim) disagree.
struct ShapeMismatch : Error {
  using Error::Error;
};

// Input validation failure on a physical value (density matrix, model, params).
struct DomainError : Error {
  using Error::Error;
};

struct NonFiniteInput : Error {
  using Error::Error;
};

struct NonHermitianHamiltonian : DomainError {
  using DomainError::DomainError;
};

struct IncompleteMeasurementSet : DomainError {
  explicit IncompleteMeasurementSet(double defect_)
      : DomainError("measurement set is incomplete: ||sum M^dag M - I||_max = " +
                    std::to_string(defect_)),
        defect(defect_) {}
  double defect;
};

// Jordan-chain construction could not account for an eigenvalue's algebraic
// multiplicity within tolerance.
struct ChainConstructionFailed : Error {
  using Error::Error;
};

// Some eigenvalue has positive real part (or a zero-real eigenvalue is
// defective), so exp(tL) has no bounded long-time limit.
struct Unstable : Error {
  explicit Unstable(const std::string& msg, double max_real_)
      : Error(msg), max_real(max_real_) {}
  double max_real;
};

// More than one stationary direction; the zero-real eigenspace basis travels
// in the payload so callers can inspect it.
struct NonUniqueSteadyState : Error {
  NonUniqueSteadyState(const std::string& msg, Matrix basis)
      : Error(msg), zero_subspace(std::move(basis)) {}
  Matrix zero_subspace;  // columns: the zero-real right eigenvectors
};

struct NotCompletelyPositive : Error {
  explicit NotCompletelyPositive(double most_negative_)
      : Error("channel is not completely positive: most negative Choi eigenvalue " +
              std::to_string(most_negative_)),
        most_negative(most_negative_) {}
  double most_negative;
};

struct NotHermitianChoi : Error {
  explicit NotHermitianChoi(double defect_)
      : Error("reshuffled superoperator is not Hermitian: defect " +
              std::to_string(defect_)),
        defect(defect_) {}
  double defect;
};

// Model-document validation failure; carries the location of the offending
// field as a JSON-pointer-style path.
struct SchemaError : Error {
  SchemaError(std::string path_, std::string reason_)
      : Error(path_ + ": " + reason_), path(std::move(path_)), reason(std::move(reason_)) {}
  std::string path;
  std::string reason;
};

struct IoError : Error {
  using Error::Error;
};

struct UsageError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Core value types.
// ---------------------------------------------------------------------------

// Vectorized operator: flat index nu*d + nu' holds X(nu, nu') (row-major).
// Carries the underlying state-space dimension d explicitly; the stored
// vector always has length d*d.
struct SuperKet {
  SuperKet() = default;
  SuperKet(int d, Vector v) : dim(d), entries(std::move(v)) {
    if (dim <= 0 || entries.size() != static_cast<Eigen::Index>(dim) * dim)
      throw ShapeMismatch("SuperKet: entries length " + std::to_string(entries.size()) +
                          " does not equal dim^2 for dim " + std::to_string(dim));
  }
  int dim = 0;
  Vector entries;
};

// Linear map on vectorized operators: a d^2 x d^2 matrix.
struct SuperOp {
  SuperOp() = default;
  SuperOp(int d, Matrix m) : dim(d), entries(std::move(m)) {
    const auto n = static_cast<Eigen::Index>(dim) * dim;
    if (dim <= 0 || entries.rows() != n || entries.cols() != n)
      throw ShapeMismatch("SuperOp: entries are " + std::to_string(entries.rows()) + "x" +
                          std::to_string(entries.cols()) + " but dim^2 is " + std::to_string(n));
  }
  int dim = 0;
  Matrix entries;
};

inline SuperKet operator*(const SuperOp& s, const SuperKet& v) {
  if (s.dim != v.dim)
    throw ShapeMismatch("SuperOp * SuperKet: dims " + std::to_string(s.dim) + " vs " +
                        std::to_string(v.dim));
  return SuperKet(v.dim, s.entries * v.entries);
}

inline SuperOp operator*(const SuperOp& a, const SuperOp& b) {
  if (a.dim != b.dim)
    throw ShapeMismatch("SuperOp * SuperOp: dims " + std::to_string(a.dim) + " vs " +
                        std::to_string(b.dim));
  return SuperOp(a.dim, a.entries * b.entries);
}

inline SuperOp operator+(const SuperOp& a, const SuperOp& b) {
  if (a.dim != b.dim)
    throw ShapeMismatch("SuperOp + SuperOp: dims " + std::to_string(a.dim) + " vs " +
                        std::to_string(b.dim));
  return SuperOp(a.dim, a.entries + b.entries);
}

inline SuperOp operator-(const SuperOp& a, const SuperOp& b) {
  if (a.dim != b.dim)
    throw ShapeMismatch("SuperOp - SuperOp: dims " + std::to_string(a.dim) + " vs " +
                        std::to_string(b.dim));
  return SuperOp(a.dim, a.entries - b.entries);
}

inline SuperOp operator*(Cplx c, const SuperOp& s) { return SuperOp(s.dim, c * s.entries); }
inline SuperOp operator*(double c, const SuperOp& s) { return SuperOp(s.dim, c * s.entries); }

// Liouville-space inner product of two superkets: <<a|b>> = sum conj(a_i) b_i.
inline Cplx overlap(const SuperKet& a, const SuperKet& b) {
  if (a.dim != b.dim)
    throw ShapeMismatch("overlap: dims " + std::to_string(a.dim) + " vs " + std::to_string(b.dim));
  return a.entries.dot(b.entries);  // Eigen's dot conjugates the left factor
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const Matrix& m) {
  return max_abs(Matrix(m - m.adjoint()));
}

// Validating wrapper for a physical state. Construction enforces unit trace,
// Hermiticity, and positive semidefiniteness (of the Hermitized matrix) at
// the tolerances below.
class DensityMatrix {
 public:
  static constexpr double tol_trace = 1e-10;
  static constexpr double tol_herm = 1e-10;
  static constexpr double tol_psd = 1e-8;  // smallest eigenvalue >= -tol_psd

  explicit DensityMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
      throw ShapeMismatch("DensityMatrix: matrix must be square and nonempty");
    if (!m_.allFinite()) throw NonFiniteInput("DensityMatrix: non-finite entries");
    const double tr_err = std::abs(m_.trace() - Cplx(1.0, 0.0));
    if (tr_err > tol_trace)
      throw DomainError("DensityMatrix: trace deviates from 1 by " + std::to_string(tr_err));
    const double herm = hermiticity_defect(m_);
    if (herm > tol_herm)
      throw DomainError("DensityMatrix: Hermiticity defect " + std::to_string(herm));
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix((m_ + m_.adjoint()) / 2.0),
                                             Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -tol_psd)
      throw DomainError("DensityMatrix: smallest eigenvalue " + std::to_string(min_eig));
  }

  // Symmetrizes antisymmetric roundoff before validating.
  static DensityMatrix hermitized(const Matrix& m) {
    return DensityMatrix(Matrix((m + m.adjoint()) / 2.0));
  }

  const Matrix& op() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  Matrix m_;
};

// A set of measurement operators M_m with optional real outcome labels.
struct MeasurementSet {
  std::vector<Matrix> ops;
  std::vector<double> labels;  // empty, or one label per operator

  // ||sum M^dag M - I||_max
  double completeness_defect() const {
    if (ops.empty()) throw DomainError("MeasurementSet: empty");
    const Eigen::Index d = ops.front().rows();
    Matrix acc = Matrix::Zero(d, d);
    for (const Matrix& m : ops) {
      if (m.rows() != d || m.cols() != d)
        throw ShapeMismatch("MeasurementSet: operators have mixed dimensions");
      acc += m.adjoint() * m;
    }
    return max_abs(Matrix(acc - Matrix::Identity(d, d)));
  }
};

}  // namespace liou
