#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "liou/generators.hpp"
#include "liou/qm.hpp"
#include "liou/spectral.hpp"
#include "liou/vectorization.hpp"
#include "oracles.hpp"

using namespace liou;
using oracles::Rng;

namespace {

Liouvillian thermal_tls(double delta = 0.0) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = delta / 2.0;
  h(1, 1) = -delta / 2.0;
  LindbladModel m;
  m.H = h;
  m.jumps = {Jump{1.5, sigma_minus()}, Jump{0.5, sigma_plus()}};
  return lindblad_liouvillian(m);
}

Matrix rank_one(const Matrix& right_col, const Matrix& left_row) {
  return right_col * left_row;
}

// Spectral projector onto the eigenvalue cluster nearest to lambda.
Matrix projector_for(const SpectralSystem& sys, Cplx lambda, double tol) {
  Matrix p = Matrix::Zero(sys.size, sys.size);
  for (int i = 0; i < sys.size; ++i) {
    if (std::abs(sys.eigenvalues(i) - lambda) <= tol) {
      p += rank_one(sys.right.col(i), sys.left.row(i));
    }
  }
  return p;
}

double multiset_distance(std::vector<Cplx> a, std::vector<Cplx> b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (const Cplx& x : a) {
    double best = 1e300;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (std::abs(b[i] - x) < best) {
        best = std::abs(b[i] - x);
        arg = i;
      }
    }
    worst = std::max(worst, best);
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(arg));
  }
  return worst;
}

}  // namespace

TEST_CASE("analyze: skew-Hermitian class with orthonormal eigenbasis") {
  Rng rng(2001);
  for (int d : {2, 3}) {
    const Liouvillian l = unitary_liouvillian(rng.hermitian(d));
    const SpectralSystem sys = analyze(l);
    CHECK(sys.klass == SpectralClass::skew_hermitian);
    CHECK(sys.dim == d);
    CHECK(sys.size == d * d);
    for (int i = 0; i < sys.size; ++i) CHECK(std::abs(sys.eigenvalues(i).real()) < 1e-12);
    CHECK(max_abs(Matrix(sys.left - sys.right.adjoint())) == 0.0);
    CHECK(max_abs(Matrix(sys.right.adjoint() * sys.right -
                         Matrix::Identity(sys.size, sys.size))) < 1e-12);
    CHECK(sys.residual < 1e-12 * std::max(1.0, max_abs(l.op.entries)));
  }
}

TEST_CASE("analyze: thermal generator is diagonalizable with spectrum {0,-1,-1,-2}") {
  const SpectralSystem sys = analyze(thermal_tls());
  CHECK(sys.klass == SpectralClass::diagonalizable);

  std::vector<Cplx> got(sys.eigenvalues.begin(), sys.eigenvalues.end());
  const std::vector<Cplx> expected = {0.0, -1.0, -1.0, -2.0};
  CHECK(multiset_distance(got, expected) < 1e-10);

  // Biorthonormality and reconstruction.
  CHECK(max_abs(Matrix(sys.right * sys.left - Matrix::Identity(4, 4))) < 1e-12);
  const Matrix recon = sys.right * sys.eigenvalues.asDiagonal() * sys.left;
  CHECK(max_abs(recon - thermal_tls().op.entries) < 1e-12);
}

TEST_CASE("analyze: thermal generator spectral projectors frozen by hand") {
  // The populations close on flat indices {0, 3} where the generator is
  // [[-3/2, 1/2], [3/2, -1/2]]: right vectors (1,3) and (1,-1), dual rows
  // (1,1)/4 and (3,-1)/4. The projectors below follow by multiplying these
  // out; they are normalization independent.
  const SpectralSystem sys = analyze(thermal_tls());

  Matrix p0 = Matrix::Zero(4, 4);
  p0(0, 0) = 0.25;
  p0(0, 3) = 0.25;
  p0(3, 0) = 0.75;
  p0(3, 3) = 0.75;
  CHECK(max_abs(projector_for(sys, Cplx(0, 0), 1e-8) - p0) < 1e-10);

  Matrix p2 = Matrix::Zero(4, 4);
  p2(0, 0) = 0.75;
  p2(0, 3) = -0.25;
  p2(3, 0) = -0.75;
  p2(3, 3) = 0.25;
  CHECK(max_abs(projector_for(sys, Cplx(-2, 0), 1e-8) - p2) < 1e-10);

  // The degenerate pair at -1 is only defined through its projector sum,
  // which must be the coherence-sector identity diag(0, 1, 1, 0).
  Matrix p1 = Matrix::Zero(4, 4);
  p1(1, 1) = 1.0;
  p1(2, 2) = 1.0;
  CHECK(max_abs(projector_for(sys, Cplx(-1, 0), 1e-8) - p1) < 1e-10);

  // All projectors resolve the identity.
  CHECK(max_abs(projector_for(sys, Cplx(0, 0), 1e-8) + projector_for(sys, Cplx(-1, 0), 1e-8) +
                projector_for(sys, Cplx(-2, 0), 1e-8) - Matrix::Identity(4, 4)) < 1e-10);
}

TEST_CASE("analyze: random similarity-diagonalizable matrices") {
  Rng rng(2002);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 3 + rep % 3;
    Vector evals(n);
    for (int i = 0; i < n; ++i) evals(i) = Cplx(-rng.uniform(0.0, 2.0), rng.uniform(-1.0, 1.0));
    // Well-conditioned random basis: unitary plus a mild perturbation.
    Matrix s = rng.unitary(n) + 0.2 * rng.matrix(n, n);
    const Matrix m = s * evals.asDiagonal() * s.inverse();
    const SpectralSystem sys = analyze_matrix(m);
    CHECK(sys.klass == SpectralClass::diagonalizable);
    std::vector<Cplx> got(sys.eigenvalues.begin(), sys.eigenvalues.end());
    std::vector<Cplx> expected(evals.begin(), evals.end());
    CHECK(multiset_distance(got, expected) < 1e-8);
    CHECK(max_abs(Matrix(m - sys.right * sys.eigenvalues.asDiagonal() * sys.left)) <
          1e-8 * std::max(1.0, max_abs(m)));
  }
}

TEST_CASE("analyze: exact Jordan blocks are classified defective with correct chains") {
  // Single nilpotent block.
  Matrix n2 = Matrix::Zero(2, 2);
  n2(0, 1) = 1.0;
  const SpectralSystem sys2 = analyze_matrix(n2);
  CHECK(sys2.klass == SpectralClass::defective);
  REQUIRE(sys2.chains.size() == 1);
  CHECK(sys2.chains[0].right.size() == 2);
  CHECK(std::abs(sys2.chains[0].lambda) < 1e-10);
  // Chain relation (M - lambda) r1 = r0 and the propagator [[1, t], [0, 1]].
  const Matrix u = propagator(sys2, 3.0);
  Matrix expected(2, 2);
  expected << 1.0, 3.0, 0.0, 1.0;
  CHECK(max_abs(u - expected) < 1e-10);

  // Shifted 3x3 block against the series exponential.
  for (const Cplx lambda : {Cplx(0.0, 0.0), Cplx(-0.5, 0.0), Cplx(-0.5, 0.3)}) {
    Matrix j3 = Matrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) j3(i, i) = lambda;
    j3(0, 1) = 1.0;
    j3(1, 2) = 1.0;
    const SpectralSystem sys = analyze_matrix(j3);
    CHECK(sys.klass == SpectralClass::defective);
    REQUIRE(sys.chains.size() == 1);
    CHECK(sys.chains[0].right.size() == 3);
    for (double t : {0.0, 0.5, 2.0, 5.0}) {
      const Matrix lib = propagator(sys, t);
      const Matrix ser = oracles::expm_series(Matrix(t * j3));
      CHECK(max_abs(lib - ser) < 1e-8 * std::max(1.0, max_abs(ser)));
    }
  }
}

TEST_CASE("analyze: rotated and mixed Jordan structure") {
  Rng rng(2003);
  // Similarity-transformed J3(-0.2) (+) [0.5] block diagonal: one chain of
  // length 3 and one of length 1, but presented in a rotated basis so the
  // computed eigenvalues scatter (by roughly eps^{1/3}) and the clustering
  // ladder has to do real work.
  Matrix m0 = Matrix::Zero(4, 4);
  m0(0, 0) = -0.2;
  m0(0, 1) = 1.0;
  m0(1, 1) = -0.2;
  m0(1, 2) = 1.0;
  m0(2, 2) = -0.2;
  m0(3, 3) = 0.5;
  const Matrix q = rng.unitary(4);
  const Matrix m = q * m0 * q.adjoint();

  const SpectralSystem sys = analyze_matrix(m);
  CHECK(sys.klass == SpectralClass::defective);
  REQUIRE(sys.chains.size() == 2);
  int len3 = 0, len1 = 0;
  for (const auto& ch : sys.chains) {
    if (ch.right.size() == 3) {
      ++len3;
      CHECK(std::abs(ch.lambda - Cplx(-0.2, 0.0)) < 1e-5);
    }
    if (ch.right.size() == 1) {
      ++len1;
      CHECK(std::abs(ch.lambda - Cplx(0.5, 0.0)) < 1e-6);
    }
  }
  CHECK(len3 == 1);
  CHECK(len1 == 1);
  CHECK(sys.residual <= 1e-7);

  for (double t : {0.5, 2.0}) {
    const Matrix lib = propagator(sys, t);
    const Matrix ser = oracles::expm_series(Matrix(t * m));
    CHECK(max_abs(lib - ser) < 1e-6 * std::max(1.0, max_abs(ser)));
  }
}

TEST_CASE("analyze: a rotated length-2 block sits at the class boundary") {
  Rng rng(2013);
  // For a similarity-transformed J2 the eigenvalue scatter is ~sqrt(eps) and
  // the eigenvector-matrix reconstruction error lands at the edge of the
  // diagonalizability guard, so the reported class is not pinned down. What
  // must hold either way: the eigenvalue cluster and the propagator accuracy.
  Matrix m0 = Matrix::Zero(3, 3);
  m0(0, 0) = -0.2;
  m0(0, 1) = 1.0;
  m0(1, 1) = -0.2;
  m0(2, 2) = 0.5;
  const Matrix q = rng.unitary(3);
  const Matrix m = q * m0 * q.adjoint();

  const SpectralSystem sys = analyze_matrix(m);
  std::vector<Cplx> evs(sys.eigenvalues.data(), sys.eigenvalues.data() + 3);
  std::sort(evs.begin(), evs.end(),
            [](const Cplx& a, const Cplx& b) { return a.real() < b.real(); });
  CHECK(std::abs(evs[0] - Cplx(-0.2, 0.0)) < 1e-6);
  CHECK(std::abs(evs[1] - Cplx(-0.2, 0.0)) < 1e-6);
  CHECK(std::abs(evs[2] - Cplx(0.5, 0.0)) < 1e-6);

  for (double t : {0.5, 2.0}) {
    const Matrix lib = propagator(sys, t);
    const Matrix ser = oracles::expm_series(Matrix(t * m));
    CHECK(max_abs(lib - ser) < 1e-6 * std::max(1.0, max_abs(ser)));
  }
}

TEST_CASE("analyze: input validation") {
  CHECK_THROWS_AS(analyze_matrix(Matrix::Zero(2, 3)), ShapeMismatch);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(analyze_matrix(bad), NonFiniteInput);
}

TEST_CASE("propagator: agrees with the series exponential in every class") {
  Rng rng(2004);
  // Skew-Hermitian.
  const Liouvillian lu = unitary_liouvillian(rng.hermitian(2));
  // Diagonalizable.
  const Liouvillian ld = thermal_tls(0.7);
  for (double t : {0.3, 1.7}) {
    CHECK(max_abs(propagator(analyze(lu), t) -
                  oracles::expm_series(Matrix(t * lu.op.entries))) < 1e-10);
    CHECK(max_abs(propagator(analyze(ld), t) -
                  oracles::expm_series(Matrix(t * ld.op.entries))) < 1e-10);
  }
}

TEST_CASE("propagator: hand-built single-vector chains reproduce the diagonal route") {
  // The defective-path block evaluation, restricted to all-length-1 chains,
  // must coincide with the plain eigenexpansion of a diagonalizable system.
  const SpectralSystem diag = analyze(thermal_tls());
  SpectralSystem chained = diag;
  chained.klass = SpectralClass::defective;
  chained.chains.clear();
  for (int i = 0; i < diag.size; ++i) {
    JordanChain ch;
    ch.lambda = diag.eigenvalues(i);
    ch.right.push_back(diag.right.col(i));
    ch.left.push_back(diag.left.row(i).transpose());
    chained.chains.push_back(std::move(ch));
  }
  for (double t : {0.0, 0.4, 2.2}) {
    CHECK(max_abs(propagator(chained, t) - propagator(diag, t)) < 1e-13);
  }
}

TEST_CASE("propagate: spectral route equals the exponential oracle") {
  Rng rng(2005);
  Matrix rho0 = Matrix::Zero(2, 2);
  rho0(0, 0) = 1.0;

  const Liouvillian l = thermal_tls(0.7);
  const std::vector<double> times = {0.0, 0.1, 1.0, 4.0};
  const Trajectory tr = propagate(l, DensityMatrix(rho0), times);
  REQUIRE(tr.states.size() == times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const DensityMatrix oracle = propagate_expm_oracle(l, DensityMatrix(rho0), times[i]);
    CHECK(max_abs(tr.states[i].op() - oracle.op()) < 1e-9);
    CHECK(std::abs(tr.states[i].op().trace().real() - 1.0) < 1e-10);
  }

  // Random relaxation models at d = 3.
  for (int rep = 0; rep < 5; ++rep) {
    const LindbladModel m = oracles::random_lindblad_model(rng, 3, 2);
    const Liouvillian lr = lindblad_liouvillian(m);
    const DensityMatrix r0 = DensityMatrix::hermitized(rng.density(3));
    const Trajectory trr = propagate(lr, r0, {0.5, 2.0});
    for (std::size_t i = 0; i < trr.times.size(); ++i) {
      const DensityMatrix oracle = propagate_expm_oracle(lr, r0, trr.times[i]);
      CHECK(max_abs(trr.states[i].op() - oracle.op()) < 1e-9);
    }
  }

  CHECK_THROWS_AS(propagate(l, DensityMatrix::hermitized(rng.density(3)), {1.0}),
                  ShapeMismatch);
}

TEST_CASE("propagate: unitary flow preserves purity and spectrum") {
  Rng rng(2006);
  const Matrix h = rng.hermitian(3);
  const Liouvillian l = unitary_liouvillian(h);
  const DensityMatrix rho0 = DensityMatrix::hermitized(rng.density(3));
  Eigen::SelfAdjointEigenSolver<Matrix> es0(rho0.op());

  const Trajectory tr = propagate(l, rho0, {0.7, 3.1});
  for (const DensityMatrix& s : tr.states) {
    CHECK(std::abs(purity(s) - purity(rho0)) < 1e-11);
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.op());
    CHECK((es.eigenvalues() - es0.eigenvalues()).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("steady_state: thermal fixed point, scale invariance, long-time limit") {
  const Liouvillian l = thermal_tls(0.7);
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 0.25;
  expected(1, 1) = 0.75;

  const DensityMatrix ss = steady_state(analyze(l));
  CHECK(max_abs(ss.op() - expected) < 1e-10);

  // Scaling the generator leaves the fixed point alone.
  const DensityMatrix ss2 = steady_state(analyze(3.0 * l));
  CHECK(max_abs(ss2.op() - ss.op()) < 1e-10);

  // And the flow actually converges there.
  Matrix rho0 = Matrix::Zero(2, 2);
  rho0(0, 0) = 1.0;
  const DensityMatrix late = propagate_expm_oracle(l, DensityMatrix(rho0), 25.0);
  CHECK(max_abs(late.op() - ss.op()) < 1e-8);
}

TEST_CASE("steady_state: failure modes") {
  // A system analyzed from a raw matrix has no vectorized-space dimension.
  Matrix n2 = Matrix::Zero(2, 2);
  n2(0, 1) = 1.0;
  CHECK_THROWS_AS(steady_state(analyze_matrix(n2)), DomainError);

  // Positive real part.
  const Liouvillian l = thermal_tls();
  const Liouvillian flipped{SuperOp(2, Matrix(-l.op.entries)), LiouvKind::combined};
  CHECK_THROWS_AS(steady_state(analyze(flipped)), Unstable);
  try {
    steady_state(analyze(flipped));
  } catch (const Unstable& e) {
    CHECK(std::abs(e.max_real - 2.0) < 1e-8);
  }

  // Pure dephasing keeps every diagonal state fixed: two zero modes.
  LindbladModel deph;
  deph.H = Matrix::Zero(2, 2);
  deph.jumps = {Jump{0.8, pauli_z()}};
  const SpectralSystem sys = analyze(lindblad_liouvillian(deph));
  CHECK_THROWS_AS(steady_state(sys), NonUniqueSteadyState);
  try {
    steady_state(sys);
  } catch (const NonUniqueSteadyState& e) {
    CHECK(e.zero_subspace.cols() == 2);
    // Each basis column really is stationary.
    const Matrix gen = lindblad_liouvillian(deph).op.entries;
    for (Eigen::Index c = 0; c < e.zero_subspace.cols(); ++c) {
      CHECK((gen * e.zero_subspace.col(c)).norm() < 1e-10);
    }
  }

  // A purely unitary generator has every population projector stationary.
  Rng rng(2007);
  CHECK_THROWS_AS(steady_state(analyze(unitary_liouvillian(rng.hermitian(2)))),
                  NonUniqueSteadyState);

  // A defective zero-real mode admits no bounded long-time limit.
  Matrix jn = Matrix::Zero(4, 4);
  jn(1, 2) = 1.0;
  const Liouvillian ljn{SuperOp(2, jn), LiouvKind::combined};
  CHECK_THROWS_AS(steady_state(analyze(ljn)), Unstable);
}

TEST_CASE("stability_report: zero-mode bookkeeping across classes") {
  // Thermal: stable, one simple zero mode.
  {
    const StabilityReport rep = stability_report(analyze(thermal_tls()));
    CHECK(rep.stable);
    CHECK(std::abs(rep.max_real) < 1e-10);
    REQUIRE(rep.zero_modes.size() == 1);
    CHECK(rep.zero_modes[0].algebraic == 1);
    CHECK(rep.zero_modes[0].geometric == 1);
    CHECK(rep.zero_modes[0].max_chain_len == 1);
    CHECK_FALSE(rep.zero_modes[0].defective);
    CHECK_FALSE(rep.any_defective_zero_mode);
    CHECK_FALSE(rep.any_degenerate_zero_mode);
  }

  // Dephasing: one zero cluster of algebraic and geometric multiplicity 2.
  {
    LindbladModel deph;
    deph.H = Matrix::Zero(2, 2);
    deph.jumps = {Jump{0.8, pauli_z()}};
    const StabilityReport rep = stability_report(analyze(lindblad_liouvillian(deph)));
    CHECK(rep.stable);
    REQUIRE(rep.zero_modes.size() == 1);
    CHECK(rep.zero_modes[0].algebraic == 2);
    CHECK(rep.zero_modes[0].geometric == 2);
    CHECK_FALSE(rep.zero_modes[0].defective);
    CHECK(rep.any_degenerate_zero_mode);
  }

  // Defective zero mode: the nilpotent toy superoperator.
  {
    Matrix jn = Matrix::Zero(4, 4);
    jn(1, 2) = 1.0;
    const Liouvillian ljn{SuperOp(2, jn), LiouvKind::combined};
    const StabilityReport rep = stability_report(analyze(ljn));
    CHECK(rep.stable);  // max Re = 0
    REQUIRE(rep.zero_modes.size() == 1);
    CHECK(rep.zero_modes[0].algebraic == 4);
    CHECK(rep.zero_modes[0].geometric == 3);
    CHECK(rep.zero_modes[0].max_chain_len == 2);
    CHECK(rep.zero_modes[0].defective);
    CHECK(rep.any_defective_zero_mode);
    CHECK(rep.any_degenerate_zero_mode);
  }
}

TEST_CASE("heisenberg_superket: phase rotation of the raising operator") {
  const double w0 = 1.7, t = 0.3;
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = w0 / 2.0;
  h(1, 1) = -w0 / 2.0;
  const Liouvillian l = unitary_liouvillian(h);

  const SuperKet moved = heisenberg_superket(l, sigma_plus(), t);
  const Matrix expected = std::exp(Cplx(0, w0 * t)) * sigma_plus();
  CHECK(max_abs(mho_inv(moved) - expected) < 1e-12);

  // Pairing identity: <<rho(t)|A>> = <<rho(0)|A_H(t)>>.
  Rng rng(2008);
  const Matrix hr = rng.hermitian(3);
  const Liouvillian lr = unitary_liouvillian(hr);
  const DensityMatrix rho0 = DensityMatrix::hermitized(rng.density(3));
  const Matrix a = rng.hermitian(3);
  for (double tt : {0.5, 2.0}) {
    const DensityMatrix rt = propagate_expm_oracle(lr, rho0, tt);
    const Cplx lhs = overlap(mho(rt.op()), mho(a));
    const Cplx rhs = overlap(mho(rho0.op()), heisenberg_superket(lr, a, tt));
    CHECK(std::abs(lhs - rhs) < 1e-11);
  }

  CHECK_THROWS_AS(heisenberg_superket(thermal_tls(), sigma_plus(), 1.0), DomainError);
}

TEST_CASE("dyson_propagator: exact limits and error behavior") {
  Rng rng(2009);
  const Matrix h = rng.hermitian(2);
  const Liouvillian l0 = unitary_liouvillian(h);
  const int d2 = 4;

  // L' = 0 reduces to the free propagator.
  const SuperOp zero(2, Matrix::Zero(d2, d2));
  const SuperOp u = dyson_propagator(l0, [&](double) { return zero; }, 1.3, 3, 8);
  CHECK(max_abs(u.entries - expm(Matrix(1.3 * l0.op.entries))) < 1e-12);

  // t = 0 is the identity.
  const SuperOp u0 = dyson_propagator(l0, [&](double) { return zero; }, 0.0, 2, 4);
  CHECK(max_abs(u0.entries - Matrix::Identity(d2, d2)) < 1e-14);

  // A small noncommuting perturbation: errors fall with order and steps.
  LindbladModel pert;
  pert.H = Matrix::Zero(2, 2);
  pert.jumps = {Jump{0.03, Matrix(sigma_minus() + 0.4 * pauli_x())}};
  const SuperOp lp = lindblad_liouvillian(pert).op;
  const Matrix exact = expm(Matrix(1.0 * (l0.op.entries + lp.entries)));

  auto err = [&](int order, int steps) {
    const SuperOp ud = dyson_propagator(l0, [&](double) { return lp; }, 1.0, order, steps);
    return max_abs(ud.entries - exact);
  };
  CHECK(err(2, 64) < err(1, 64));
  CHECK(err(3, 64) <= err(2, 64) * 1.5);  // third order is already quadrature-bound
  CHECK(err(2, 64) < err(2, 8));
  CHECK(err(3, 128) < 1e-5);

  // Residual estimate reports the size of the first omitted term.
  double resid = -1.0;
  dyson_propagator(l0, [&](double) { return lp; }, 1.0, 2, 32, &resid);
  CHECK(resid > 0.0);
  CHECK(resid < 1e-2);

  CHECK_THROWS_AS(dyson_propagator(l0, [&](double) { return zero; }, 1.0, 0, 8), DomainError);
  CHECK_THROWS_AS(dyson_propagator(l0, [&](double) { return zero; }, 1.0, 4, 8), DomainError);
  CHECK_THROWS_AS(dyson_propagator(l0, [&](double) { return zero; }, 1.0, 2, 0), DomainError);
  const SuperOp wrong(3, Matrix::Zero(9, 9));
  CHECK_THROWS_AS(dyson_propagator(l0, [&](double) { return wrong; }, 1.0, 2, 8),
                  ShapeMismatch);
}

TEST_CASE("analyze: explicit tolerance overrides are recorded") {
  const SpectralSystem sys = analyze(thermal_tls(), 1e-6, 1e-9);
  CHECK(sys.tol_cluster_used == 1e-6);
  CHECK(sys.tol_diag_used == 1e-9);
}
