#include <doctest.h>

#include "flatbands/errors.hpp"
#include "flatbands/magic.hpp"
#include "oracles.hpp"

using namespace flatbands;

namespace {

const Potentials& bm() {
  static const Potentials p = make_potentials(bm_potential_U());
  return p;
}

MagicCandidate real_candidate(double a) {
  MagicCandidate c;
  c.alpha = a;
  c.lambda = 1.0 / (a * a);
  c.converged = true;
  c.unreliable = false;
  return c;
}

}  // namespace

TEST_CASE("alpha_from_lambda picks the branch with Re > 0, or Im > 0 on the imaginary axis") {
  for (const cplx l : {cplx{0.25}, cplx{0.3, 0.4}, cplx{-2.0, 0.1}, cplx{1.0, -3.0}}) {
    const cplx a = alpha_from_lambda(l);
    CHECK(std::abs(1.0 / (a * a) - l) < 1e-12 * std::abs(l));
    CHECK(a.real() > 0.0);
  }
  CHECK(alpha_from_lambda(-0.25) == cplx(0.0, 2.0));
  CHECK(alpha_from_lambda(cplx{-0.25, 0.0}).imag() > 0.0);
  CHECK_THROWS_AS(alpha_from_lambda(0.0), InputError);
}

TEST_CASE("clustering and filtering of a synthetic spectrum") {
  const std::vector<cplx> spec{1.0, 1.0 + 1e-8, 0.25, -0.25, {0.0, 0.25}, 1e-6, 0.0};
  const auto c = magics_from_spectrum(Model::Scalar, spec, 3.0, 8.0);
  REQUIRE(c.size() == 4);
  CHECK(std::abs(c[0].alpha - cplx(0.0, 2.0)) < 1e-12);
  CHECK(std::abs(c[1].alpha - 1.0) < 1e-8);
  CHECK(c[1].multiplicity == 2);
  CHECK(std::abs(c[2].alpha - cplx(std::sqrt(2.0), -std::sqrt(2.0))) < 1e-12);
  CHECK(std::abs(c[3].alpha - 2.0) < 1e-12);
  CHECK(c[3].multiplicity == 1);
  for (const auto& x : c) {
    CHECK(x.radius == 3.0);
    CHECK(x.unreliable);
  }
  // A tighter tolerance separates the pair.
  CHECK(magics_from_spectrum(Model::Scalar, spec, 3.0, 8.0, 1e-10).size() == 5);
}

TEST_CASE("zero potential has no magic parameters") {
  const auto zero = make_potentials(TrigPolynomial(LatticeSpec::gamma_star()));
  CHECK(magics_from_T(Model::Scalar, zero, {0.0, 1.0}, 3.0 * dual_unit, 8.0).empty());
  CHECK(magics_from_T(Model::Chiral, zero, {0.0, 1.0}, 3.0 * dual_unit, 8.0).empty());
  MagicSearchConfig cfg;
  cfg.radii = {3.0 * dual_unit, 4.0 * dual_unit};
  const auto res = find_magics(zero, cfg);
  CHECK(res.candidates.empty());
  CHECK(res.spacings.empty());
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(radius_ladder(Model::Scalar, bm(), {0.0, 1.0}, {4.0 * dual_unit}, 8.0), InputError);
  CHECK_THROWS_AS(radius_ladder(Model::Scalar, bm(), {0.0, 1.0}, {5.0 * dual_unit, 4.0 * dual_unit}, 8.0),
                  InputError);
  const std::vector<MagicCandidate> one{real_candidate(1.5)};
  const cplx k{0.0, 1.0};
  CHECK_THROWS_AS(cross_validate(one, Model::Scalar, bm(), k, k, 3.0 * dual_unit), InputError);
  CHECK_THROWS_AS(cross_validate(one, Model::Scalar, bm(), k, oracle::w * k, 3.0 * dual_unit), InputError);
  CHECK(cross_validate({}, Model::Scalar, bm(), k, k, 3.0 * dual_unit).empty());
}

TEST_CASE("ladder threshold") {
  CHECK(ladder_threshold(1.0, 8.0) == 1e-8);
  CHECK(ladder_threshold(4.0, 8.0) == 1e-8);
  CHECK(ladder_threshold(6.0, 8.0) == doctest::Approx(std::pow(10.0, -6.5)));
  CHECK(ladder_threshold(8.0, 8.0) == doctest::Approx(1e-5));
  CHECK(ladder_threshold(20.0, 8.0) == doctest::Approx(1e-5));
}

TEST_CASE("spacings use only converged real candidates") {
  std::vector<MagicCandidate> c{real_candidate(3.0), real_candidate(1.0), real_candidate(6.5)};
  auto complex_one = real_candidate(2.0);
  complex_one.alpha = {2.0, 0.5};
  auto bad = real_candidate(5.0);
  bad.unreliable = true;
  c.push_back(complex_one);
  c.push_back(bad);
  const auto s = real_magic_spacings(c);
  REQUIRE(s.size() == 2);
  CHECK(s[0].alpha == 1.0);
  CHECK(s[0].delta == 2.0);
  CHECK(s[1].alpha == 3.0);
  CHECK(s[1].delta == 3.5);
}

TEST_CASE("first real magic parameter of the scalar model") {
  const double R = 12.0 * dual_unit;
  const auto c = magics_from_T(Model::Scalar, bm(), {0.0, 1.0}, R, 2.0);
  const MagicCandidate* first = nullptr;
  for (const auto& x : c) {
    if (std::abs(x.alpha.imag()) < 1e-8) {
      first = &x;
      break;
    }
  }
  REQUIRE(first != nullptr);
  CHECK(first->alpha.real() == doctest::Approx(1.4690811270).epsilon(1e-9));
  CHECK(first->multiplicity == 2);
  CHECK(flat_residual(Model::Scalar, bm(), first->alpha, {0.3, -0.7}, 8.0 * dual_unit) < 1e-8);
  CHECK(flat_residual(Model::Scalar, bm(), 1.4, {0.3, -0.7}, 8.0 * dual_unit) > 1e-4);
}

TEST_CASE("spectra of T are covariant under k -> omega k and k -> k + gamma") {
  const double R = 6.0 * dual_unit;
  const cplx k{0.4, 0.9};
  auto spec = [&](Model m, cplx kk) { return eigenvalues(assemble_T(m, bm(), kk, R).entries).eigenvalues; };
  auto top = [](std::vector<cplx> v) {
    v.resize(20);
    return v;
  };
  for (const Model m : {Model::Scalar, Model::Chiral}) {
    const auto a = top(spec(m, k));
    CHECK(oracle::multiset_gap(a, spec(m, oracle::w * k)) < 1e-8);
    CHECK(oracle::multiset_gap(a, spec(m, k + LatticeSpec::lambda_star().b1())) < 1e-8);
  }
}

TEST_CASE("ladder is deterministic and converged candidates are stable") {
  const std::vector<double> radii{6.0 * dual_unit, 8.0 * dual_unit};
  const auto a = radius_ladder(Model::Scalar, bm(), {0.0, 1.0}, radii, 2.0);
  const auto b = radius_ladder(Model::Scalar, bm(), {0.0, 1.0}, radii, 2.0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].alpha == b[i].alpha);
    CHECK(a[i].ladder_delta == b[i].ladder_delta);
  }
  bool found = false;
  for (const auto& c : a) {
    if (std::abs(c.alpha - 1.4690811270) < 1e-6) {
      found = true;
      CHECK_FALSE(c.unreliable);
      CHECK(c.ladder_delta < 1e-8);
    }
  }
  CHECK(found);
}
