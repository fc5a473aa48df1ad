#include <doctest.h>

#include <cmath>
#include <complex>

#include "liou/qm.hpp"
#include "oracles.hpp"

using namespace liou;
using oracles::Rng;

namespace {

// The theta-family of pure states used across the suite:
// rho1 = [[1/2, -e^{i theta}/2], [-e^{-i theta}/2, 1/2]].
Matrix rho1_theta(double theta) {
  Matrix r(2, 2);
  const Cplx phase = std::exp(Cplx(0.0, theta));
  r << 0.5, -0.5 * phase, -0.5 * std::conj(phase), 0.5;
  return r;
}

// Partially mixed companion: off-diagonal -i (sqrt(2)/3) sin(theta).
Matrix rho2_theta(double theta) {
  Matrix r(2, 2);
  const Cplx c = Cplx(0.0, -std::sqrt(2.0) / 3.0 * std::sin(theta));
  r << 0.5, c, -c, 0.5;
  return r;
}

}  // namespace

TEST_CASE("hs_inner: trace form, conjugation order and the sigma+ example") {
  // <sigma+, sigma+> = Tr[sigma+ dagger(sigma+)] = Tr[|e><g|g><e|] = 1,
  // recomputed here by explicit matrix multiplication.
  const Matrix sp = sigma_plus();
  const Matrix prod = sp * dagger(sp);
  CHECK(std::abs(prod.trace() - Cplx(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(hs_inner(sp, sp) - Cplx(1.0, 0.0)) < 1e-15);

  // <sigma+, sigma-> = Tr[sigma- dagger(sigma+)] = 0.
  CHECK(std::abs(hs_inner(sp, sigma_minus())) < 1e-15);

  Rng rng(101);
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 2 + static_cast<int>(rng.uniform(0.0, 2.999));
    const Matrix a = rng.matrix(d, d), b = rng.matrix(d, d);
    // Definition check against the explicit double loop.
    CHECK(std::abs(hs_inner(a, b) - oracles::hs_inner_naive(a, b)) < 1e-12);
    // Equality with the trace form Tr[B dagger(A)].
    CHECK(std::abs(hs_inner(a, b) - (b * dagger(a)).trace()) < 1e-12);
    // Conjugate symmetry and positivity.
    CHECK(std::abs(hs_inner(a, b) - std::conj(hs_inner(b, a))) < 1e-12);
    CHECK(hs_inner(a, a).real() > 0.0);
    CHECK(std::abs(hs_inner(a, a).imag()) < 1e-12);
  }
}

TEST_CASE("hs_inner: shape mismatch raises") {
  CHECK_THROWS_AS(hs_inner(Matrix::Zero(2, 2), Matrix::Zero(3, 3)), ShapeMismatch);
}

TEST_CASE("purity: pure family stays at 1, mixed family hits 5/6 at pi/3") {
  for (double theta : {0.0, M_PI / 4.0, M_PI / 3.0}) {
    CHECK(std::abs(purity(DensityMatrix(rho1_theta(theta))) - 1.0) < 1e-12);
  }
  // Tr[rho2^2] = 1/2 + (4/9) sin^2(theta); at theta = pi/3 this is
  // 1/2 + (4/9)(3/4) = 5/6.
  const double p = purity(DensityMatrix(rho2_theta(M_PI / 3.0)));
  CHECK(std::abs(p - 5.0 / 6.0) < 1e-12);
  // And the general formula across a sweep.
  for (double theta : {0.1, 0.7, 1.3, 2.9}) {
    const double expected = 0.5 + 4.0 / 9.0 * std::pow(std::sin(theta), 2);
    CHECK(std::abs(purity(DensityMatrix(rho2_theta(theta))) - expected) < 1e-12);
  }
}

TEST_CASE("expectation: diagonal states against sigma_z") {
  for (double p : {0.0, 0.25, 0.5, 1.0}) {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = p;
    rho(1, 1) = 1.0 - p;
    const Cplx v = expectation(DensityMatrix(rho), pauli_z());
    CHECK(std::abs(v - Cplx(2.0 * p - 1.0, 0.0)) < 1e-14);
  }
}

TEST_CASE("measure_prob: projector onto the lower level via sigma+") {
  // M = sigma+ maps |g> to |e>; p = Tr[dagger(M) M rho] = rho_gg.
  for (double p : {0.0, 0.3, 0.9}) {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = p;
    rho(1, 1) = 1.0 - p;
    CHECK(std::abs(measure_prob(DensityMatrix(rho), sigma_plus()) - (1.0 - p)) < 1e-14);
  }

  // Probabilities of a complete projective measurement sum to one.
  Rng rng(202);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix rho = rng.density(3);
    const Matrix u = rng.unitary(3);
    double total = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Matrix proj = u.col(k) * u.col(k).adjoint();
      const double pk = measure_prob(DensityMatrix::hermitized(rho), proj);
      CHECK(pk >= 0.0);
      CHECK(pk <= 1.0);
      total += pk;
    }
    CHECK(std::abs(total - 1.0) < 1e-10);
  }
}

TEST_CASE("nonselective_update: projective dephasing kills coherences") {
  // P_e, P_g on the pure rho1 family: off-diagonals vanish, diagonal stays.
  MeasurementSet set;
  Matrix pe = Matrix::Zero(2, 2), pg = Matrix::Zero(2, 2);
  pe(0, 0) = 1.0;
  pg(1, 1) = 1.0;
  set.ops = {pe, pg};

  const DensityMatrix out = nonselective_update(DensityMatrix(rho1_theta(M_PI / 3.0)), set);
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 0.5;
  expected(1, 1) = 0.5;
  CHECK(max_abs(out.op() - expected) < 1e-14);
  // The dephased state is maximally mixed: purity 1/2.
  CHECK(std::abs(purity(out) - 0.5) < 1e-12);
}

TEST_CASE("nonselective_update: incomplete set is rejected with its defect") {
  MeasurementSet set;
  set.ops = {sigma_plus()};  // sum M^dag M = diag(0, 1) != I
  const Matrix rho = rho1_theta(0.0);
  CHECK_THROWS_AS(nonselective_update(DensityMatrix(rho), set), IncompleteMeasurementSet);
  try {
    nonselective_update(DensityMatrix(rho), set);
  } catch (const IncompleteMeasurementSet& e) {
    CHECK(std::abs(e.defect - 1.0) < 1e-14);
  }
}

TEST_CASE("expm: rotation identity and series agreement") {
  // exp(i (pi/2) sigma_x) = cos(pi/2) I + i sin(pi/2) sigma_x = i sigma_x.
  const Matrix got = expm(Matrix(Cplx(0.0, M_PI / 2.0) * pauli_x()));
  const Matrix expected = Cplx(0.0, 1.0) * pauli_x();
  CHECK(max_abs(got - expected) < 1e-13);

  Rng rng(303);
  for (int rep = 0; rep < 25; ++rep) {
    const int d = 2 + rep % 3;
    Matrix a = rng.matrix(d, d);
    a *= rng.uniform(0.1, 2.0) / std::max(1.0, a.norm());
    const Matrix lib = expm(a);
    const Matrix ser = oracles::expm_series(a);
    CHECK(max_abs(lib - ser) < 1e-12 * std::max(1.0, max_abs(ser)));
  }

  // exp(A) exp(-A) = I.
  Matrix a = rng.matrix(3, 3);
  CHECK(max_abs(expm(a) * expm(Matrix(-a)) - Matrix::Identity(3, 3)) < 1e-12);

  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(expm(bad), NonFiniteInput);
  CHECK_THROWS_AS(expm(Matrix::Zero(2, 3)), ShapeMismatch);
}

TEST_CASE("kron: agrees with the index-definition loop and the mixed-product rule") {
  Rng rng(404);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = rng.matrix(2, 3), b = rng.matrix(3, 2);
    CHECK(max_abs(kron(a, b) - oracles::kron_naive(a, b)) == 0.0);
  }
  // (A (x) B)(C (x) D) = AC (x) BD.
  const Matrix a = rng.matrix(2, 2), b = rng.matrix(3, 3);
  const Matrix c = rng.matrix(2, 2), d = rng.matrix(3, 3);
  const Matrix lhs = kron(a, b) * kron(c, d);
  const Matrix rhs = kron(Matrix(a * c), Matrix(b * d));
  CHECK(max_abs(lhs - rhs) < 1e-12 * std::max(1.0, max_abs(rhs)));
}

TEST_CASE("DensityMatrix: validation rejects unphysical inputs") {
  Matrix not_trace_one = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix{not_trace_one}, DomainError);

  Matrix not_herm(2, 2);
  not_herm << 0.5, 0.3, 0.0, 0.5;
  CHECK_THROWS_AS(DensityMatrix{not_herm}, DomainError);

  Matrix not_psd(2, 2);
  not_psd << 1.5, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(DensityMatrix{not_psd}, DomainError);

  Matrix nan = Matrix::Zero(2, 2);
  nan(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(DensityMatrix{nan}, NonFiniteInput);
}
