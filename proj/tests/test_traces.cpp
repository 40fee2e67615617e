#include <doctest.h>

#include "flatbands/errors.hpp"
#include "flatbands/traces.hpp"
#include "oracles.hpp"

using namespace flatbands;

namespace {

const Potentials& bm() {
  static const Potentials p = make_potentials(bm_potential_U());
  return p;
}

// V̂ from the closed form: V = −(16π²/9) Σ_{ℓ≠m} ω^{ℓ+m} e^{i⟨z,(ω^ℓ−ω^m)K⟩}.
std::vector<std::pair<cplx, cplx>> v_modes() {
  std::vector<std::pair<cplx, cplx>> out;
  const double K = 4.0 * oracle::pi / 3.0;
  for (int l = 0; l < 3; ++l) {
    for (int m = 0; m < 3; ++m) {
      if (l == m) continue;
      out.emplace_back((std::pow(oracle::w, l) - std::pow(oracle::w, m)) * K,
                       -16.0 * oracle::pi * oracle::pi / 9.0 * std::pow(oracle::w, l + m));
    }
  }
  return out;
}

// Σ_γ Σ_q V̂(q)V̂(−q) / ((γ+k)²(γ+q+k)²) with both vertices inside the window.
cplx scalar_trace2_oracle(cplx k, double R) {
  const auto modes = v_modes();
  cplx s = 0.0;
  for (const cplx g : oracle::lambda_star_points(R, k)) {
    for (const auto& [q, c] : modes) {
      const cplx h = g + q;
      if (std::abs(h + k) > R) continue;
      cplx c_back = 0.0;
      for (const auto& [q2, c2] : modes) {
        if (std::abs(q2 + q) < 1e-9) c_back = c2;
      }
      s += c * c_back / ((g + k) * (g + k) * (h + k) * (h + k));
    }
  }
  return s;
}

}  // namespace

TEST_CASE("p = 2 lattice sum matches a brute-force double sum") {
  for (const cplx k : {cplx{0.0, 1.0}, cplx{0.4, -0.3}}) {
    const double R = 5.0 * dual_unit;
    const auto r = trace_power_lattice(Model::Scalar, bm(), k, 2, R);
    CHECK(oracle::rel_diff(r.value, scalar_trace2_oracle(k, R)) < 1e-12);
  }
}

TEST_CASE("lattice sums equal traces of powers of the truncated matrix") {
  const cplx k{0.3, 0.8};
  for (const Model m : {Model::Scalar, Model::Chiral}) {
    const double R = (m == Model::Scalar ? 4.0 : 2.0) * dual_unit;
    const Matrix t = assemble_T(m, bm(), k, R).entries;
    Matrix power = t;
    for (int p = 2; p <= 3; ++p) {
      power = power * t;
      const cplx lattice = trace_power_lattice(m, bm(), k, p, R).value;
      CHECK(oracle::rel_diff(lattice, power.trace()) < 1e-10);
      CHECK(oracle::rel_diff(lattice, trace_power_eig(m, bm(), k, p, R).value) < 1e-8);
    }
    if (m == Model::Scalar) {
      CHECK(std::abs(trace_first_power_lattice(m, bm(), k, R)) == 0.0);
    } else {
      CHECK(oracle::rel_diff(trace_first_power_lattice(m, bm(), k, R), t.trace()) < 1e-10);
    }
  }
}

TEST_CASE("tail bound dominates the change with radius and shrinks") {
  const cplx k{0.0, 1.0};
  const auto a = trace_power_lattice(Model::Scalar, bm(), k, 2, 6.0 * dual_unit);
  const auto b = trace_power_lattice(Model::Scalar, bm(), k, 2, 12.0 * dual_unit);
  CHECK(std::isfinite(a.tail_bound));
  CHECK(b.tail_bound < a.tail_bound);
  CHECK(std::abs(a.value - b.value) <= a.tail_bound + b.tail_bound);
  const auto c = trace_power_lattice(Model::Chiral, bm(), k, 2, 6.0 * dual_unit);
  const auto d = trace_power_lattice(Model::Chiral, bm(), k, 2, 9.0 * dual_unit);
  CHECK(d.tail_bound < c.tail_bound);
  CHECK(std::abs(c.value - d.value) <= c.tail_bound + d.tail_bound);
}

TEST_CASE("trace is independent of k within the tail bounds") {
  const double R = 12.0 * dual_unit;
  const auto a = trace_power_lattice(Model::Scalar, bm(), {0.0, 1.0}, 2, R);
  const auto b = trace_power_lattice(Model::Scalar, bm(), {1.0, 0.5}, 2, R);
  CHECK(std::abs(a.value - b.value) <= a.tail_bound + b.tail_bound);
  CHECK(std::abs(a.value.imag()) <= a.tail_bound);
  // Exact symmetries of the truncation.
  const cplx k{0.6, -0.2};
  const cplx t = trace_power_lattice(Model::Scalar, bm(), k, 2, 6.0 * dual_unit).value;
  CHECK(oracle::rel_diff(t, trace_power_lattice(Model::Scalar, bm(), oracle::w * k, 2, 6.0 * dual_unit).value) <
        1e-12);
  CHECK(oracle::rel_diff(t, trace_power_lattice(Model::Scalar, bm(), k + LatticeSpec::lambda_star().b2(), 2,
                                                6.0 * dual_unit)
                                .value) < 1e-12);
}

TEST_CASE("scalar tr T^2 is close to (8/3) pi/sqrt3") {
  const auto r = trace_power_lattice(Model::Scalar, bm(), {0.0, 1.0}, 2, 18.0 * dual_unit);
  CHECK(r.value.real() / pi_over_sqrt3 == doctest::Approx(8.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("zero potential and errors") {
  const auto zero = make_potentials(TrigPolynomial(LatticeSpec::gamma_star()));
  for (const Model m : {Model::Scalar, Model::Chiral}) {
    const auto r = trace_power_lattice(m, zero, {0.0, 1.0}, 2, 4.0 * dual_unit);
    CHECK(r.value == cplx{});
    CHECK(r.tail_bound == 0.0);
  }
  CHECK_THROWS_AS(trace_power_lattice(Model::Scalar, bm(), {0.0, 1.0}, 1, 4.0 * dual_unit), InputError);
  CHECK_THROWS_AS(trace_power_lattice(Model::Scalar, bm(), 0.0, 2, 4.0 * dual_unit), SingularShift);
  CHECK_THROWS_AS(trace_power_lattice(Model::Chiral, bm(), 4.0 * oracle::pi / 3.0, 2, 4.0 * dual_unit),
                  SingularShift);
}

TEST_CASE("rational probe") {
  auto r = rational_probe(pi_over_sqrt3);
  REQUIRE(r.has_value());
  CHECK(r->num == 1);
  CHECK(r->den == 1);
  r = rational_probe(0.0);
  REQUIRE(r.has_value());
  CHECK(r->num == 0);
  CHECK(r->den == 1);
  r = rational_probe(940.0 / 81.0 * pi_over_sqrt3);
  REQUIRE(r.has_value());
  CHECK(r->num == 940);
  CHECK(r->den == 81);
  r = rational_probe(-5.0 / 7.0, 1.0);
  REQUIRE(r.has_value());
  CHECK(r->num == -5);
  CHECK(r->den == 7);
  CHECK_FALSE(rational_probe(std::numbers::e, 1.0, 100).has_value());
  CHECK_FALSE(rational_probe(4.836821103).has_value());
  CHECK_THROWS_AS(rational_probe(1.0, 1.0, 0), InputError);
}

TEST_CASE("sum rule gap shrinks as converged magics are added") {
  const cplx k{0.0, 1.0};
  const double R = 8.0 * dual_unit;
  auto cands = magics_from_T(Model::Scalar, bm(), k, R, 6.0);
  for (auto& c : cands) c.converged = true;
  const auto small = sum_rule_check(Model::Scalar, bm(), k, R, cands, 2.0);
  const auto large = sum_rule_check(Model::Scalar, bm(), k, R, cands, 6.0);
  CHECK(large.gap <= small.gap);
  CHECK(large.relative_gap < 0.05);
  CHECK(std::abs(small.trace - large.trace) == 0.0);
  CHECK(oracle::rel_diff(large.converged_sum + large.unconverged_mass,
                         trace_power_eig(Model::Scalar, bm(), k, 2, R).value) < 1e-12);
}
