#pragma once
/*! \file
    \brief Gohberg–Sigal multiplicity by the argument principle.

    m(α,k) = (1/2πi) tr ∮_{|ζ−k|=r} Q(α,ζ)⁻¹ ∂_ζQ(α,ζ) dζ, evaluated with the
    periodic trapezoid rule. Truncated families are polynomial in ζ, so the
    winding counts zeros only; there is no pole bookkeeping to do.

    The value "m = ∞" (α magic, Q(α,k) singular for every k) is operational:
    the contour keeps hitting a zero through four radius halvings and σ_min of
    Q at a generic k is below tolerance.
*/

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "flatbands/eig.hpp"
#include "flatbands/operators.hpp"

namespace flatbands {

struct HolomorphicFamily {
  std::string label;
  /// (Q(ζ), ∂_ζQ(ζ)).
  std::function<std::pair<Matrix, Matrix>(cplx)> evaluate;
  /// Reference magnitude for the σ_min-on-contour test.
  double scale = 1.0;
  /// Truncation provenance for reports.
  std::string window;
};

/// ζ ↦ Q(α,ζ) on a Λ* window.
HolomorphicFamily scalar_family(const Potentials& pots, cplx alpha, const BasisWindow& w);
/// ζ ↦ D(α) + ζ on a Γ* window.
HolomorphicFamily chiral_family(const Potentials& pots, cplx alpha, const BasisWindow& w);
/// Any user-supplied family, e.g. the 1×1 counterexample ζ ↦ 1 − αζ.
HolomorphicFamily custom_family(std::string label, std::function<Matrix(cplx)> value,
                                std::function<Matrix(cplx)> derivative, double scale = 1.0);

struct MultiplicityOptions {
  int n_quad = 64;
  int max_n_quad = 1024;
  /// Successive quadrature doublings must agree this closely.
  double agree_tol = 1e-3;
  double integer_tol = 0.05;
  /// ContourThroughZero when σ_min(Q(ζ)) < contour_tol·scale on a node.
  double contour_tol = 1e-8;
  double cond_threshold = 1e13;
};

struct MultiplicityResult {
  int m = 0;
  bool infinite = false;
  /// Contour integral before rounding.
  cplx raw;
  cplx center;
  double radius = 0.0;
  int n_quad = 0;
  std::string window;
};

MultiplicityResult gohberg_sigal_m(const HolomorphicFamily& family, cplx k, double r,
                                   const MultiplicityOptions& opts = {});

/// 0.25·(distance from k to the nearest other lattice point), capped at
/// 0.25·(4π/(3√3)).
double default_contour_radius(cplx k, const LatticeSpec& lattice);

/// Default window radius for multiplicity runs, in units of 4π/√3. Γ* is
/// nine times denser than Λ* and D has two components, hence the smaller
/// chiral window.
inline double default_mult_radius_units(Model model) { return model == Model::Scalar ? 6.0 : 2.0; }

struct ProtectedReport {
  MultiplicityResult result;
  bool at_least_two = false;
  bool two_mod_three = false;
};

/// m(α, 0) for the scalar family with an automatic contour. A magic α comes
/// back with result.infinite = true.
ProtectedReport protected_multiplicity_scalar(const Potentials& pots, cplx alpha,
                                              double window_radius,
                                              const MultiplicityOptions& opts = {});

/// Returns Infinite for persistent ContourThroughZero at a magic α, else the
/// usual result. Shared by the scalar and chiral entry points.
MultiplicityResult multiplicity_with_dichotomy(Model model, const Potentials& pots, cplx alpha,
                                               cplx k, double window_radius,
                                               const MultiplicityOptions& opts = {});

struct ProfileEntry {
  cplx k;
  bool ok = false;
  MultiplicityResult result;
  std::string error;
};

/// Batch evaluation over k with one window centred at the origin.
std::vector<ProfileEntry> multiplicity_profile(Model model, const Potentials& pots, cplx alpha,
                                               const std::vector<cplx>& ks, double window_radius,
                                               const MultiplicityOptions& opts = {});

}  // namespace flatbands
