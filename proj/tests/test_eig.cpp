#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "flatbands/eig.hpp"
#include "flatbands/errors.hpp"
#include "oracles.hpp"

using namespace flatbands;

namespace {

Matrix random_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
  }
  return a;
}

// Durand–Kerner on the monic cubic with coefficients from cofactor expansion.
std::vector<cplx> charpoly_roots_3x3(const Matrix& a) {
  auto minor = [&](int i, int j) { return a(i, i) * a(j, j) - a(i, j) * a(j, i); };
  const cplx c2 = -(a(0, 0) + a(1, 1) + a(2, 2));
  const cplx c1 = minor(0, 1) + minor(0, 2) + minor(1, 2);
  const cplx c0 = -(a(0, 0) * minor(1, 2) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                    a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)));
  std::vector<cplx> z{{0.4, 0.9}, {0.4, 0.9}, {0.4, 0.9}};
  z[1] *= z[0];
  z[2] = z[1] * z[0];
  for (int it = 0; it < 1000; ++it) {
    for (int i = 0; i < 3; ++i) {
      cplx den = 1.0;
      for (int j = 0; j < 3; ++j) {
        if (j != i) den *= z[i] - z[j];
      }
      z[i] -= (((z[i] + c2) * z[i] + c1) * z[i] + c0) / den;
    }
  }
  return z;
}

}  // namespace

TEST_CASE("eigenvalues of a 3x3 match characteristic polynomial roots") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix a = random_matrix(3, seed);
    CHECK(oracle::multiset_gap(charpoly_roots_3x3(a), eigenvalues(a).eigenvalues) < 1e-9);
  }
}

TEST_CASE("eigenvalues are invariant under permutation similarity") {
  const int n = 30;
  const Matrix a = random_matrix(n, 42);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(3));
  Matrix b(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) b(i, j) = a(perm[i], perm[j]);
  }
  CHECK(oracle::multiset_gap(eigenvalues(a).eigenvalues, eigenvalues(b).eigenvalues) < 1e-9);
}

TEST_CASE("triangular matrices expose their diagonal; residuals are tiny") {
  Matrix a = random_matrix(12, 5).triangularView<Eigen::Upper>();
  std::vector<cplx> diag;
  for (int i = 0; i < 12; ++i) diag.push_back(a(i, i));
  const auto res = eigenvalues(a, true);
  CHECK(oracle::multiset_gap(diag, res.eigenvalues) < 1e-12);
  REQUIRE(res.residuals.size() == 12);
  for (const double r : res.residuals) CHECK(r < 1e-12);
  CHECK(eigenvalues(a).residuals.empty());
}

TEST_CASE("canonical sort: descending modulus, then real, then imaginary") {
  std::vector<cplx> v{{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {0.5, 0}, {-3, 0}};
  sort_canonical(v);
  const std::vector<cplx> expected{{-3, 0}, {1, 0}, {0, 1}, {0, -1}, {-1, 0}, {0.5, 0}};
  CHECK(v == expected);
}

TEST_CASE("bad input is rejected") {
  CHECK_THROWS_AS(eigenvalues(Matrix::Zero(2, 3)), InputError);
  Matrix nan = Matrix::Identity(2, 2);
  nan(0, 1) = {std::nan(""), 0.0};
  CHECK_THROWS_AS(eigenvalues(nan), InputError);
  CHECK(eigenvalues(Matrix(0, 0)).eigenvalues.empty());
}

TEST_CASE("singular values agree with the Hermitian eigenproblem of A*A") {
  const Matrix a = random_matrix(15, 9);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(a.adjoint() * a);
  std::vector<double> expected;
  for (int i = 0; i < 15; ++i) expected.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i))));
  std::sort(expected.rbegin(), expected.rend());
  const auto sv = singular_values(a);
  REQUIRE(sv.size() == 15);
  for (int i = 0; i < 15; ++i) CHECK(sv[i] == doctest::Approx(expected[i]).epsilon(1e-9));
  const auto small = smallest_singular_values(a, 3);
  REQUIRE(small.size() == 3);
  CHECK(small[0] == doctest::Approx(expected[14]).epsilon(1e-9));
  CHECK(small[2] == doctest::Approx(expected[12]).epsilon(1e-9));
  CHECK(sigma_min_estimate(a) == doctest::Approx(expected[14]).epsilon(1e-6));
}

TEST_CASE("sigma_min_estimate on singular and nearly singular matrices") {
  Matrix a = random_matrix(10, 13);
  a.col(3) = a.col(1) * cplx(2.0, -1.0);
  CHECK(sigma_min_estimate(a) < 1e-12 * a.norm());
  Matrix d = Matrix::Identity(6, 6);
  d(4, 4) = 1e-9;
  CHECK(sigma_min_estimate(d) == doctest::Approx(1e-9).epsilon(1e-6));
}

TEST_CASE("logderiv_trace equals tr(A^-1 dA) from an explicit inverse") {
  const Matrix a = random_matrix(8, 21) + 4.0 * Matrix::Identity(8, 8);
  const Matrix da = random_matrix(8, 22);
  const cplx expected = (a.inverse() * da).trace();
  CHECK(std::abs(logderiv_trace(a, da) - expected) < 1e-10 * std::abs(expected));
  Matrix s = a;
  s.row(2).setZero();
  CHECK_THROWS_AS(logderiv_trace(s, da), NearSingular);
}
