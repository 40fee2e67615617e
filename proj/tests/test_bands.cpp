#include <doctest.h>

#include <sstream>

#include "flatbands/bands.hpp"
#include "flatbands/errors.hpp"
#include "oracles.hpp"

using namespace flatbands;

namespace {

const Potentials& bm() {
  static const Potentials p = make_potentials(bm_potential_U());
  return p;
}

const double alpha1 = 1.4690811270;

}  // namespace

TEST_CASE("k sets") {
  const auto lat = LatticeSpec::lambda_star();
  const auto g = make_grid(lat, 5);
  CHECK(g.points.size() == 25);
  CHECK(g.kind == KSetKind::Grid);
  CHECK(std::abs(g.points[1] - lat.b2() / 5.0) < 1e-12);
  const auto p = default_band_path(lat, 10);
  CHECK(p.points.size() == 31);
  CHECK(p.points.front() == cplx{});
  CHECK(p.points.back() == cplx{});
  CHECK_THROWS_AS(make_grid(lat, 0), InputError);
  CHECK_THROWS_AS(make_path({0.0}, 3), InputError);
  CHECK_THROWS_AS(make_path({0.0, 1.0}, 0), InputError);
}

TEST_CASE("alpha = 0 energies are the smallest |gamma + k|^2") {
  const double R = 3.0 * dual_unit;
  const auto ks = make_path({{0.3, 0.1}, {1.2, -2.0}}, 4);
  const auto sweep = band_sweep(Model::Scalar, bm(), 0.0, ks, 4, R);
  for (std::size_t i = 0; i < ks.points.size(); ++i) {
    const cplx k = ks.points[i];
    std::vector<double> expected;
    for (const cplx p : oracle::lambda_star_points(R, k)) expected.push_back(std::norm(p + k));
    std::sort(expected.begin(), expected.end());
    for (int b = 0; b < 4; ++b) CHECK(sweep.energies[i][b] == doctest::Approx(expected[b]).epsilon(1e-10));
  }
}

TEST_CASE("protected zero at k = 0 for any alpha") {
  const auto ks = make_path({0.0, 1.0}, 1);
  for (const Model m : {Model::Scalar, Model::Chiral}) {
    const double R = (m == Model::Scalar ? 5.0 : 2.0) * dual_unit;
    const auto sweep = band_sweep(m, bm(), 0.8, ks, 2, R);
    CHECK(sweep.energies[0][0] < 1e-10 * sweep.scale);
    // Scalar Q vanishes to second order along one vector; chiral D has a
    // two-dimensional kernel.
    if (m == Model::Chiral) CHECK(sweep.energies[0][1] < 1e-10 * sweep.scale);
    CHECK(sweep.energies[1][0] > 1e-4 * sweep.scale);
  }
}

TEST_CASE("bands are periodic and rotation invariant") {
  const double R = 5.0 * dual_unit;
  const cplx k{0.7, -1.3};
  const KSet ks = make_path({k, k + LatticeSpec::lambda_star().b1()}, 1);
  const KSet rot = make_path({k, oracle::w * k}, 1);
  for (const auto& set : {ks, rot}) {
    const auto s = band_sweep(Model::Scalar, bm(), 0.9, set, 3, R);
    for (int b = 0; b < 3; ++b) CHECK(s.energies[0][b] == doctest::Approx(s.energies[1][b]).epsilon(1e-9));
  }
}

TEST_CASE("flat band at a magic parameter and not elsewhere") {
  const double R = 6.0 * dual_unit;
  const auto grid = make_grid(LatticeSpec::lambda_star(), 4);
  const auto flat = flat_band_check(Model::Scalar, bm(), alpha1, grid, 1e-6, R);
  CHECK(flat.is_flat);
  CHECK(flat.max_sigma_min < 1e-8 * flat.scale);
  const auto not_flat = flat_band_check(Model::Scalar, bm(), 1.2, grid, 1e-6, R);
  CHECK_FALSE(not_flat.is_flat);
  CHECK_THROWS_AS(flat_band_check(Model::Scalar, bm(), 1.2, default_band_path(LatticeSpec::lambda_star(), 2),
                                  1e-6, R),
                  InputError);
}

TEST_CASE("one generic k decides flatness") {
  const double R = 6.0 * dual_unit;
  const auto grid = make_grid(LatticeSpec::lambda_star(), 4);
  for (const double a : {alpha1, 1.2}) {
    const auto rep = one_k_equivalence(Model::Scalar, bm(), a, {0.3, -0.7}, grid, 1e-6, R);
    CHECK(rep.consistent);
    CHECK(rep.below_k0 == (a == alpha1));
  }
  CHECK_THROWS_AS(one_k_equivalence(Model::Scalar, bm(), 1.2, 0.0, grid, 1e-6, R), SingularShift);
}

TEST_CASE("band energies vary continuously on a fixed window") {
  // |σ_j(A) − σ_j(B)| ≤ ‖A − B‖₂ ≤ max|diag difference| for Q at nearby k.
  const double R = 4.0 * dual_unit;
  const cplx k{0.5, 0.2}, dk{1e-3, -2e-3};
  const auto w = make_window(LatticeSpec::lambda_star(), R, k);
  const auto a = smallest_singular_values(assemble_scalar_Q(bm(), 0.9, k, w).entries, 3);
  const auto b = smallest_singular_values(assemble_scalar_Q(bm(), 0.9, k + dk, w).entries, 3);
  double bound = 0.0;
  for (const auto& m : w.modes) {
    const cplx p = mode_to_point(w.lattice, m);
    bound = std::max(bound, std::abs((p + k + dk) * (p + k + dk) - (p + k) * (p + k)));
  }
  for (int j = 0; j < 3; ++j) CHECK(std::abs(a[j] - b[j]) <= bound * (1.0 + 1e-9));
}

TEST_CASE("errors and csv output") {
  const auto ks = make_path({{0.3, 0.1}, {0.5, 0.1}}, 1);
  CHECK_THROWS_AS(band_sweep(Model::Scalar, bm(), 0.5, ks, 100, 1.0 * dual_unit), InputError);
  CHECK_THROWS_AS(band_sweep(Model::Scalar, bm(), 0.5, ks, 0, 1.0 * dual_unit), InputError);
  const auto s = band_sweep(Model::Scalar, bm(), 0.5, ks, 2, 2.0 * dual_unit);
  const std::string csv = bands_csv(s);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "k_re,k_im,band_index,energy");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
  CHECK(csv.find("0.29999999999999999,0.10000000000000001,0,") != std::string::npos);
}
