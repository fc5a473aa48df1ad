#include "liou/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "liou/qm.hpp"
#include "liou/vectorization.hpp"

namespace liou {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxJordanSize = 16;

struct Cluster {
  Cplx mean;
  std::vector<int> members;
};

// Deterministic grouping: sort by (Re desc, Im asc), then greedily attach
// each eigenvalue to the nearest cluster mean within tol.
std::vector<Cluster> cluster_eigenvalues(const Vector& evals, double tol) {
  std::vector<int> order(evals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const Cplx x = evals(a), y = evals(b);
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() < y.imag();
  });
  std::vector<Cluster> out;
  for (int idx : order) {
    Cluster* best = nullptr;
    double best_dist = tol;
    for (Cluster& c : out) {
      const double dist = std::abs(evals(idx) - c.mean);
      if (dist <= best_dist) {
        best = &c;
        best_dist = dist;
      }
    }
    if (best) {
      best->members.push_back(idx);
      Cplx sum(0, 0);
      for (int m : best->members) sum += evals(m);
      best->mean = sum / static_cast<double>(best->members.size());
    } else {
      out.push_back(Cluster{evals(idx), {idx}});
    }
  }
  return out;
}

// Jordan chains for one eigenvalue cluster. Weyr counts w_m come from the
// nullspace growth of (M - lambda)^m; chain tops at height m are picked from
// null((M - lambda)^m) orthogonal both to null((M - lambda)^{m-1}) and to the
// height-m vectors of taller chains, then pushed down with (M - lambda).
// delta_est is the assumed eigenvalue uncertainty (sets rank thresholds).
std::vector<std::vector<Vector>> cluster_chains(const Matrix& m, Cplx lambda, int alg,
                                                double delta_est) {
  const Eigen::Index n = m.rows();
  const Matrix b = m - lambda * Matrix::Identity(n, n);
  const double bscale = std::max(1.0, b.norm());

  std::vector<Matrix> nulls;  // nulls[k-1] = orthonormal basis of null(b^k)
  std::vector<int> dims{0};
  Matrix bp = Matrix::Identity(n, n);
  int p = 0;
  for (int k = 1; k <= alg; ++k) {
    bp = bp * b;
    Eigen::JacobiSVD<Matrix> svd(bp, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tau = std::max(static_cast<double>(n) * kEps * sv(0),
                                3.0 * k * delta_est * std::pow(bscale, k - 1));
    int nd = 0;
    for (Eigen::Index i = sv.size() - 1; i >= 0 && sv(i) <= tau; --i) ++nd;
    if (nd > alg)
      throw ChainConstructionFailed("nullspace dimension " + std::to_string(nd) +
                                    " exceeds algebraic multiplicity " + std::to_string(alg));
    if (nd <= dims.back())
      throw ChainConstructionFailed("nullspace growth stagnated at dimension " +
                                    std::to_string(nd) + " below multiplicity " +
                                    std::to_string(alg));
    nulls.push_back(svd.matrixV().rightCols(nd));
    dims.push_back(nd);
    if (nd == alg) {
      p = k;
      break;
    }
  }
  if (p == 0)
    throw ChainConstructionFailed("nullspaces never reached algebraic multiplicity " +
                                  std::to_string(alg));

  std::vector<int> weyr(p + 2, 0);
  for (int k = 1; k <= p; ++k) weyr[k] = dims[k] - dims[k - 1];

  std::vector<std::vector<Vector>> chains;  // each: rank-ascending vectors
  for (int len = p; len >= 1; --len) {
    const int count = weyr[len] - weyr[len + 1];
    if (count <= 0) continue;
    // Orthonormal wall: null(b^{len-1}) plus the height-len vectors of the
    // (strictly taller) chains already built.
    std::vector<Vector> wall_src;
    if (len >= 2)
      for (Eigen::Index c = 0; c < nulls[len - 2].cols(); ++c)
        wall_src.push_back(nulls[len - 2].col(c));
    for (const auto& ch : chains) wall_src.push_back(ch[len - 1]);
    std::vector<Vector> ortho;
    auto project_out = [&ortho](Vector v) {
      for (const Vector& q : ortho) v -= q * q.dot(v);
      return v;
    };
    for (Vector& w : wall_src) {
      Vector r = project_out(project_out(w));
      if (r.norm() > 1e-12) ortho.push_back(r.normalized());
    }
    int got = 0;
    const Matrix& cand = nulls[len - 1];
    for (Eigen::Index c = 0; c < cand.cols() && got < count; ++c) {
      Vector r = project_out(project_out(Vector(cand.col(c))));
      if (r.norm() <= 1e-7) continue;
      r.normalize();
      ortho.push_back(r);
      std::vector<Vector> chain(len);
      chain[len - 1] = r;
      for (int k = len - 1; k >= 1; --k) chain[k - 1] = b * chain[k];
      if (chain[0].norm() <= 1e-12)
        throw ChainConstructionFailed("chain collapsed while descending from height " +
                                      std::to_string(len));
      chains.push_back(std::move(chain));
      ++got;
    }
    if (got < count)
      throw ChainConstructionFailed("found only " + std::to_string(got) + " of " +
                                    std::to_string(count) + " independent chains at height " +
                                    std::to_string(len));
  }
  return chains;
}

struct JordanBuild {
  Vector eigenvalues;
  Matrix right;
  Matrix left;
  std::vector<JordanChain> chains;
  double residual = 0.0;
};

JordanBuild build_jordan(const Matrix& m, const Vector& evals, double delta) {
  const Eigen::Index n = m.rows();
  const std::vector<Cluster> clusters = cluster_eigenvalues(evals, delta);

  struct ChainRec {
    Cplx lambda;
    std::vector<Vector> right;
  };
  std::vector<ChainRec> recs;
  for (const Cluster& cl : clusters) {
    auto chains = cluster_chains(m, cl.mean, static_cast<int>(cl.members.size()), delta);
    // Deterministic block order: longest chains first.
    std::stable_sort(chains.begin(), chains.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    for (auto& ch : chains) recs.push_back(ChainRec{cl.mean, std::move(ch)});
  }

  JordanBuild out;
  out.right.resize(n, n);
  out.eigenvalues.resize(n);
  Eigen::Index col = 0;
  for (const ChainRec& rec : recs) {
    for (const Vector& v : rec.right) {
      if (col >= n) throw ChainConstructionFailed("chain vectors exceed matrix dimension");
      out.right.col(col) = v;
      out.eigenvalues(col) = rec.lambda;
      ++col;
    }
  }
  if (col != n)
    throw ChainConstructionFailed("chain vectors span only " + std::to_string(col) + " of " +
                                  std::to_string(n) + " dimensions");

  Eigen::FullPivLU<Matrix> lu(out.right);
  if (!lu.isInvertible())
    throw ChainConstructionFailed("generalized eigenbasis is numerically singular");
  out.left = lu.inverse();

  // Block Jordan form for the residual check.
  Matrix j = Matrix::Zero(n, n);
  Eigen::Index off = 0;
  for (const ChainRec& rec : recs) {
    const Eigen::Index p = static_cast<Eigen::Index>(rec.right.size());
    for (Eigen::Index i = 0; i < p; ++i) {
      j(off + i, off + i) = rec.lambda;
      if (i + 1 < p) j(off + i, off + i + 1) = 1.0;
    }
    off += p;
  }
  const double scale = std::max(1.0, max_abs(m));
  const double recon = max_abs(Matrix(m * out.right - out.right * j)) / scale;
  const double inv_resid = max_abs(Matrix(out.right * out.left - Matrix::Identity(n, n)));
  out.residual = std::max(recon, inv_resid);
  if (out.residual > 1e-7)
    throw ChainConstructionFailed("Jordan residual " + std::to_string(out.residual) +
                                  " above tolerance");

  off = 0;
  for (const ChainRec& rec : recs) {
    JordanChain jc;
    jc.lambda = rec.lambda;
    jc.right = rec.right;
    for (std::size_t i = 0; i < rec.right.size(); ++i)
      jc.left.push_back(out.left.row(off + static_cast<Eigen::Index>(i)).transpose());
    off += static_cast<Eigen::Index>(rec.right.size());
    out.chains.push_back(std::move(jc));
  }
  return out;
}

}  // namespace

SpectralSystem analyze_matrix(const Matrix& m, double tol_cluster, double tol_diag) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ShapeMismatch("analyze: matrix must be square and nonempty");
  if (!m.allFinite()) throw NonFiniteInput("analyze: non-finite entries");
  const Eigen::Index n = m.rows();
  const double fro = m.norm();
  const double tc = tol_cluster >= 0.0 ? tol_cluster : std::max(1e-10, 1e-8 * fro);

  SpectralSystem sys;
  sys.size = static_cast<int>(n);
  sys.tol_cluster_used = tc;

  if (max_abs(Matrix(m + m.adjoint())) <= tc) {
    // Skew-Hermitian: iM is Hermitian, so the eigenbasis is orthonormal and
    // the eigenvalues are purely imaginary.
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(Cplx(0, 1) * m));
    if (es.info() != Eigen::Success) throw Error("analyze: Hermitian eigensolver failed");
    sys.klass = SpectralClass::skew_hermitian;
    sys.right = es.eigenvectors();
    sys.left = sys.right.adjoint();
    sys.eigenvalues.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) sys.eigenvalues(i) = Cplx(0, -es.eigenvalues()(i));
    sys.residual =
        max_abs(Matrix(m - sys.right * sys.eigenvalues.asDiagonal() * sys.left));
    return sys;
  }

  Eigen::ComplexEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw Error("analyze: eigensolver failed");
  Vector evals = es.eigenvalues();
  Matrix vecs = es.eigenvectors();

  // Deterministic column order: Re descending, then Im ascending.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (evals(a).real() != evals(b).real()) return evals(a).real() > evals(b).real();
    return evals(a).imag() < evals(b).imag();
  });
  Vector sorted_evals(n);
  Matrix sorted_vecs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sorted_evals(i) = evals(order[i]);
    sorted_vecs.col(i) = vecs.col(order[i]);
  }

  Eigen::JacobiSVD<Matrix> svd(sorted_vecs);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(n - 1);
  const double td = tol_diag >= 0.0 ? tol_diag : static_cast<double>(n) * kEps * smax;
  sys.tol_diag_used = td;

  if (smin > td) {
    Eigen::FullPivLU<Matrix> lu(sorted_vecs);
    if (lu.isInvertible()) {
      Matrix left = lu.inverse();
      const double recon =
          max_abs(Matrix(m - sorted_vecs * sorted_evals.asDiagonal() * left));
      // Behavior guard: an eigenbasis that cannot reproduce M to roundoff
      // levels is treated as defective even if it passed the sigma test.
      if (recon <= 1e-8 * std::max(1.0, max_abs(m))) {
        sys.klass = SpectralClass::diagonalizable;
        sys.eigenvalues = std::move(sorted_evals);
        sys.right = std::move(sorted_vecs);
        sys.left = std::move(left);
        sys.residual =
            std::max(recon, max_abs(Matrix(sys.right * sys.left - Matrix::Identity(n, n))));
        return sys;
      }
    }
  }

  if (n > kMaxJordanSize)
    throw ChainConstructionFailed(
        "defective generator of size " + std::to_string(n) +
        " exceeds the Jordan-route limit of 16; supply chains externally");

  // Clustering ladder: computed eigenvalues of a defective matrix scatter
  // like eps^(1/p) around the true value, so retry with widening tolerances
  // until the chain construction produces a small residual.
  std::vector<double> ladder{tc};
  for (double e : {std::pow(kEps, 2.0 / 3.0), std::sqrt(kEps), std::pow(kEps, 1.0 / 3.0),
                   std::pow(kEps, 0.25)}) {
    const double delta = std::max(tc, 10.0 * e * std::max(1.0, fro));
    if (delta > ladder.back()) ladder.push_back(delta);
  }
  std::string last_error = "no clustering tolerance attempted";
  for (double delta : ladder) {
    try {
      JordanBuild jb = build_jordan(m, sorted_evals, delta);
      sys.klass = SpectralClass::defective;
      sys.eigenvalues = std::move(jb.eigenvalues);
      sys.right = std::move(jb.right);
      sys.left = std::move(jb.left);
      sys.chains = std::move(jb.chains);
      sys.residual = jb.residual;
      sys.tol_cluster_used = delta;
      return sys;
    } catch (const ChainConstructionFailed& e) {
      last_error = e.what();
    }
  }
  throw ChainConstructionFailed("Jordan chain construction failed at every clustering tolerance; last error: " +
                                last_error);
}

SpectralSystem analyze(const Liouvillian& l, double tol_cluster, double tol_diag) {
  SpectralSystem sys = analyze_matrix(l.op.entries, tol_cluster, tol_diag);
  sys.dim = l.op.dim;
  return sys;
}

namespace {

// exp(tJ) applied to a coefficient vector, block by block:
// out[i] = e^{t lambda} sum_k t^k/k! c[i+k] within each chain block.
Vector apply_exp_jordan(const SpectralSystem& sys, double t, const Vector& c) {
  Vector out(c.size());
  Eigen::Index off = 0;
  for (const JordanChain& ch : sys.chains) {
    const int p = static_cast<int>(ch.right.size());
    const Cplx ephase = std::exp(t * ch.lambda);
    for (int i = 0; i < p; ++i) {
      Cplx acc(0, 0);
      double fact = 1.0;
      double tpow = 1.0;
      for (int k = 0; i + k < p; ++k) {
        if (k > 0) {
          fact *= k;
          tpow *= t;
        }
        acc += (tpow / fact) * c(off + i + k);
      }
      out(off + i) = ephase * acc;
    }
    off += p;
  }
  if (off != c.size()) throw Error("apply_exp_jordan: chains do not cover the basis");
  return out;
}

}  // namespace

Matrix propagator(const SpectralSystem& sys, double t) {
  const Eigen::Index n = sys.size;
  if (sys.klass != SpectralClass::defective) {
    Vector e = (sys.eigenvalues * t).array().exp().matrix();
    return sys.right * e.asDiagonal() * sys.left;
  }
  Matrix ej = Matrix::Zero(n, n);
  Eigen::Index off = 0;
  for (const JordanChain& ch : sys.chains) {
    const int p = static_cast<int>(ch.right.size());
    const Cplx ephase = std::exp(t * ch.lambda);
    double fact = 1.0;
    double tpow = 1.0;
    for (int k = 0; k < p; ++k) {
      if (k > 0) {
        fact *= k;
        tpow *= t;
      }
      const Cplx coef = ephase * tpow / fact;
      for (int i = 0; i + k < p; ++i) ej(off + i, off + i + k) = coef;
    }
    off += p;
  }
  return sys.right * ej * sys.left;
}

Trajectory propagate(const Liouvillian& l, const DensityMatrix& rho0,
                     const std::vector<double>& times, double tol_cluster, double tol_diag) {
  if (rho0.dim() != l.op.dim)
    throw ShapeMismatch("propagate: state dimension does not match the generator");
  for (double t : times)
    if (!std::isfinite(t)) throw NonFiniteInput("propagate: non-finite time");

  const SpectralSystem sys = analyze(l, tol_cluster, tol_diag);
  const Vector v0 = mho(rho0.op()).entries;
  const Vector c0 = sys.left * v0;

  Trajectory tr;
  tr.times = times;
  tr.states.reserve(times.size());
  for (double t : times) {
    Vector ct;
    if (sys.klass != SpectralClass::defective)
      ct = ((sys.eigenvalues * t).array().exp() * c0.array()).matrix();
    else
      ct = apply_exp_jordan(sys, t, c0);
    const Vector w = sys.right * ct;
    tr.states.push_back(DensityMatrix::hermitized(mho_inv(SuperKet(l.op.dim, w))));
  }
  return tr;
}

DensityMatrix propagate_expm_oracle(const Liouvillian& l, const DensityMatrix& rho0, double t) {
  if (rho0.dim() != l.op.dim)
    throw ShapeMismatch("propagate_expm_oracle: state dimension does not match the generator");
  const Matrix u = expm(Matrix(t * l.op.entries));
  const Vector w = u * mho(rho0.op()).entries;
  return DensityMatrix::hermitized(mho_inv(SuperKet(l.op.dim, w)));
}

DensityMatrix steady_state(const SpectralSystem& sys, double tol_stab, double tol_zero) {
  if (sys.dim <= 0)
    throw DomainError("steady_state: spectral system does not describe a vectorized space");
  const double max_real = sys.eigenvalues.real().maxCoeff();
  if (max_real > tol_stab)
    throw Unstable("steady_state: eigenvalue with real part " + std::to_string(max_real) +
                       " exceeds the stability tolerance",
                   max_real);
  if (sys.klass == SpectralClass::defective) {
    for (const JordanChain& ch : sys.chains)
      if (std::abs(ch.lambda.real()) <= tol_zero && ch.right.size() > 1)
        throw Unstable("steady_state: zero-real eigenvalue carries a Jordan chain of length " +
                           std::to_string(ch.right.size()) + "; no bounded limit",
                       max_real);
  }
  std::vector<Eigen::Index> zero_cols;
  for (Eigen::Index i = 0; i < sys.eigenvalues.size(); ++i)
    if (std::abs(sys.eigenvalues(i).real()) <= tol_zero) zero_cols.push_back(i);
  if (zero_cols.empty())
    throw DomainError("steady_state: no stationary mode within tolerance " +
                      std::to_string(tol_zero));
  if (zero_cols.size() > 1) {
    Matrix basis(sys.right.rows(), static_cast<Eigen::Index>(zero_cols.size()));
    for (std::size_t k = 0; k < zero_cols.size(); ++k) basis.col(k) = sys.right.col(zero_cols[k]);
    throw NonUniqueSteadyState("steady_state: " + std::to_string(zero_cols.size()) +
                                   " zero-real modes; stationary direction is not unique",
                               std::move(basis));
  }
  const Vector zeta = sys.right.col(zero_cols.front());
  Matrix x = mho_inv(SuperKet(sys.dim, zeta));
  const Cplx tr = x.trace();
  if (std::abs(tr) < 1e-12)
    throw DomainError("steady_state: stationary mode is traceless and cannot be normalized");
  return DensityMatrix::hermitized(x / tr);
}

StabilityReport stability_report(const SpectralSystem& sys, double tol_stab, double tol_zero) {
  StabilityReport rep;
  rep.tol_stab = tol_stab;
  rep.tol_zero = tol_zero;
  rep.max_real = sys.eigenvalues.real().maxCoeff();
  rep.stable = rep.max_real <= tol_stab;

  const double group_tol = std::max(sys.tol_cluster_used, tol_zero);
  if (sys.klass == SpectralClass::defective) {
    for (const JordanChain& ch : sys.chains) {
      if (std::abs(ch.lambda.real()) > tol_zero) continue;
      ZeroMode* mode = nullptr;
      for (ZeroMode& zm : rep.zero_modes)
        if (std::abs(zm.lambda - ch.lambda) <= group_tol) mode = &zm;
      if (!mode) {
        rep.zero_modes.push_back(ZeroMode{ch.lambda, 0, 0, 0, false});
        mode = &rep.zero_modes.back();
      }
      mode->algebraic += static_cast<int>(ch.right.size());
      mode->geometric += 1;
      mode->max_chain_len = std::max(mode->max_chain_len, static_cast<int>(ch.right.size()));
    }
  } else {
    for (const Cluster& cl : cluster_eigenvalues(sys.eigenvalues, sys.tol_cluster_used)) {
      if (std::abs(cl.mean.real()) > tol_zero) continue;
      const int k = static_cast<int>(cl.members.size());
      rep.zero_modes.push_back(ZeroMode{cl.mean, k, k, 1, false});
    }
  }
  for (ZeroMode& zm : rep.zero_modes) {
    zm.defective = zm.max_chain_len > 1;
    rep.any_defective_zero_mode = rep.any_defective_zero_mode || zm.defective;
    rep.any_degenerate_zero_mode = rep.any_degenerate_zero_mode || zm.geometric > 1;
  }
  return rep;
}

SuperKet heisenberg_superket(const Liouvillian& l, const Matrix& a, double t) {
  if (l.kind != LiouvKind::unitary)
    throw DomainError("heisenberg_superket: requires a unitary-kind generator");
  if (a.rows() != l.op.dim || a.cols() != l.op.dim)
    throw ShapeMismatch("heisenberg_superket: operator dimension does not match the generator");
  const Matrix u = expm(Matrix(t * l.op.entries));
  return SuperKet(l.op.dim, u.adjoint() * mho(a).entries);
}

SuperOp dyson_propagator(const Liouvillian& l0, const std::function<SuperOp(double)>& lprime,
                         double t, int order, int steps, double* residual_estimate) {
  if (order < 1 || order > 3)
    throw DomainError("dyson_propagator: order must be between 1 and 3");
  if (steps < 1) throw DomainError("dyson_propagator: steps must be positive");
  const int d = l0.op.dim;
  const Eigen::Index n = l0.op.entries.rows();
  const double h = t / steps;

  // Interaction-frame samples A_j = U0(s_j)^{-1} L'(s_j) U0(s_j) on the
  // uniform grid s_j = j h. The free propagators accumulate from one-step
  // exponentials of the time-independent L0.
  const Matrix e_fwd = expm(Matrix(h * l0.op.entries));
  const Matrix e_bwd = expm(Matrix(-h * l0.op.entries));
  std::vector<Matrix> a(static_cast<std::size_t>(steps) + 1);
  Matrix u0 = Matrix::Identity(n, n);
  Matrix u0_inv = Matrix::Identity(n, n);
  for (int j = 0; j <= steps; ++j) {
    const SuperOp lp = lprime(j * h);
    if (lp.dim != d)
      throw ShapeMismatch("dyson_propagator: L' dimension does not match L0");
    a[j] = u0_inv * lp.entries * u0;
    if (j < steps) {
      u0 = e_fwd * u0;
      u0_inv = e_bwd * u0_inv;
    }
  }

  // Nested iterated integrals by cumulative composite trapezoid:
  // g1(s) = Int_0^s A, g2(s) = Int_0^s A g1, g3(s) = Int_0^s A g2.
  auto cumulative = [&](const std::vector<Matrix>& f) {
    std::vector<Matrix> g(f.size(), Matrix::Zero(n, n));
    for (int j = 0; j + 1 <= steps; ++j) g[j + 1] = g[j] + (h / 2.0) * (f[j] + f[j + 1]);
    return g;
  };
  const std::vector<Matrix> g1 = cumulative(a);
  Matrix ui = Matrix::Identity(n, n) + g1[steps];
  std::vector<Matrix> prev = g1;
  Matrix last_term = g1[steps];
  for (int ord = 2; ord <= order; ++ord) {
    std::vector<Matrix> f(static_cast<std::size_t>(steps) + 1);
    for (int j = 0; j <= steps; ++j) f[j] = a[j] * prev[j];
    prev = cumulative(f);
    last_term = prev[steps];
    ui += last_term;
  }
  if (residual_estimate) {
    // Magnitude of the first omitted term, bounded by ||Int A||^(order+1)/(order+1)!.
    const double base = g1[steps].norm();
    double fact = 1.0;
    for (int k = 2; k <= order + 1; ++k) fact *= k;
    *residual_estimate = std::pow(base, order + 1) / fact;
  }
  const Matrix u0t = expm(Matrix(t * l0.op.entries));
  return SuperOp(d, u0t * ui);
}

}  // namespace liou
