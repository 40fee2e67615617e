#include <doctest.h>

#include <random>
#include <set>

#include "flatbands/errors.hpp"
#include "flatbands/lattice.hpp"
#include "flatbands/potential.hpp"
#include "oracles.hpp"

using namespace flatbands;

TEST_CASE("dual lattices pair to 2pi Z with their lattices") {
  for (const auto& [direct, dual] : {std::pair{LatticeSpec::lambda(), LatticeSpec::lambda_star()},
                                    std::pair{LatticeSpec::gamma(), LatticeSpec::gamma_star()}}) {
    CHECK(direct.dual() == dual);
    CHECK(dual.dual() == direct);
    for (const cplx a : {direct.b1(), direct.b2()}) {
      for (const cplx b : {dual.b1(), dual.b2()}) {
        const double t = pairing(a, b) / (2.0 * std::numbers::pi);
        CHECK(std::abs(t - std::round(t)) < 1e-12);
      }
    }
  }
}

TEST_CASE("lattice points match the closed forms") {
  CHECK(std::abs(mode_to_point(LatticeSpec::lambda_star(), {2, -1}) - oracle::lambda_star(2, -1)) < 1e-12);
  CHECK(std::abs(mode_to_point(LatticeSpec::gamma_star(), {1, 3}) - oracle::gamma_star(1, 3)) < 1e-12);
  CHECK(std::abs(mode_to_point(LatticeSpec::lambda(), {1, 0}) - oracle::w) < 1e-15);
  CHECK(LatticeSpec::lambda_star().shortest() == doctest::Approx(4.0 * std::numbers::pi / std::sqrt(3.0)));
  CHECK(LatticeSpec::gamma_star().shortest() == doctest::Approx(4.0 * std::numbers::pi / (3.0 * std::sqrt(3.0))));
  CHECK(LatticeSpec::lambda().cell_area() == doctest::Approx(std::sqrt(3.0) / 2.0));
  // K = 4π/3 on Γ*.
  CHECK(std::abs(mode_to_point(LatticeSpec::gamma_star(), k_point_index) - 4.0 * std::numbers::pi / 3.0) < 1e-12);
  // Λ* ⊂ Γ*.
  const ModeIndex idx{2, -5};
  CHECK(std::abs(mode_to_point(LatticeSpec::lambda_star(), idx) -
                 mode_to_point(LatticeSpec::gamma_star(), lambda_star_to_gamma_star(idx))) < 1e-12);
}

TEST_CASE("norm2 is the exact squared length") {
  for (long m = -4; m <= 4; ++m) {
    for (long n = -4; n <= 4; ++n) {
      const double len2 = std::norm(double(m) * oracle::w + double(n));
      CHECK(static_cast<double>(ModeIndex{m, n}.norm2()) == doctest::Approx(len2));
    }
  }
}

TEST_CASE("point_to_coords inverts mode_to_point") {
  const auto spec = LatticeSpec::gamma_star();
  const auto [x, y] = point_to_coords(spec, mode_to_point(spec, {3, -7}));
  CHECK(x == doctest::Approx(3.0));
  CHECK(y == doctest::Approx(-7.0));
}

TEST_CASE("truncated_modes agrees with a brute-force scan") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const auto spec = LatticeSpec::lambda_star();
  for (int t = 0; t < 5; ++t) {
    const double R = 3.0 * dual_unit + t;
    const cplx shift{u(rng), u(rng)};
    const auto modes = truncated_modes(spec, R, shift);
    CHECK(modes.size() == oracle::lambda_star_points(R, shift).size());
    CHECK(std::is_sorted(modes.begin(), modes.end(), CanonicalLess{}));
    for (const auto& m : modes) CHECK(std::abs(mode_to_point(spec, m) + shift) <= R);
  }
  CHECK(truncated_modes(spec, 0.5, 0.0).size() == 1);
  CHECK(truncated_modes(spec, 0.5, cplx{0.0, 0.5 * dual_unit}).size() == 0);
}

TEST_CASE("rotate_mode multiplies the point by omega") {
  const auto spec = LatticeSpec::gamma_star();
  for (const ModeIndex idx : {ModeIndex{1, 0}, ModeIndex{2, -3}, ModeIndex{-4, 1}}) {
    const cplx p = mode_to_point(spec, idx);
    CHECK(std::abs(mode_to_point(spec, rotate_mode(idx, 1)) - oracle::w * p) < 1e-12);
    CHECK(std::abs(mode_to_point(spec, rotate_mode(idx, 2)) - oracle::w * oracle::w * p) < 1e-12);
    CHECK(rotate_mode(idx, 3) == idx);
    CHECK(rotate_mode(idx, -1) == rotate_mode(idx, 2));
  }
}

TEST_CASE("nearest_dual_point matches exhaustive search") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  const auto spec = LatticeSpec::lambda_star();
  for (int t = 0; t < 50; ++t) {
    const cplx k{u(rng), u(rng)};
    double best = INFINITY;
    for (const cplx p : oracle::lambda_star_points(100.0, 0.0)) best = std::min(best, std::abs(p - k));
    const auto got = nearest_dual_point(k, spec);
    CHECK(got.distance == doctest::Approx(best).epsilon(1e-12));
    CHECK(std::abs(mode_to_point(spec, got.index) - k) == doctest::Approx(best).epsilon(1e-12));
  }
  // On the lattice: distance 0 and the "other" distance is the shortest vector.
  const cplx g = mode_to_point(spec, {1, 2});
  CHECK(nearest_dual_point(g, spec).index == ModeIndex{1, 2});
  CHECK(distance_to_other_point(g, spec) == doctest::Approx(spec.shortest()));
  CHECK(distance_to_other_point(cplx{0.0, 1.0}, spec) == doctest::Approx(1.0));
}
