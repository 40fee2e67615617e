#pragma once
/*! \file
    \brief Magic parameters from Birman–Schwinger spectra.

    α is magic iff α⁻² ∈ Spec T_k for some (equivalently every) k off the dual
    lattice. Only α² enters Q, so the canonical representative has Re α ≥ 0
    (Im α ≥ 0 when Re α = 0).

    A candidate is trusted only after three independent checks: it is stable
    along a ladder of truncation radii, it reappears in Spec T_{k2} at a
    second shift, and σ_min(Q(α,k')) is small at a third shift. Large |α| is
    where the truncated non-normal operators go pseudospectral, so anything
    past max_abs_alpha is labelled unreliable rather than dropped.
*/

#include <limits>
#include <vector>

#include "flatbands/operators.hpp"

namespace flatbands {

struct MagicCandidate {
  cplx alpha;
  /// Source eigenvalue λ = α⁻² (cluster mean).
  cplx lambda;
  Model model = Model::Scalar;
  /// Truncation radius (absolute) of the spectrum the candidate came from.
  double radius = 0.0;
  /// σ_min(Q(α,k'))/scale at an independent k'; NaN when not computed.
  double residual = std::numeric_limits<double>::quiet_NaN();
  /// min_μ∈Spec T_{k2} |λ − μ|/|λ|; NaN when not cross-validated.
  double cross_k_delta = std::numeric_limits<double>::quiet_NaN();
  /// |α − α_prev| against the previous ladder radius; NaN without a ladder,
  /// +inf when unmatched.
  double ladder_delta = std::numeric_limits<double>::quiet_NaN();
  /// Size of the λ-cluster.
  int multiplicity = 1;
  bool converged = false;
  bool unreliable = true;
};

/// Canonical α with α² = 1/λ.
cplx alpha_from_lambda(cplx lambda);

/// Candidates from an already computed spectrum: one per λ-cluster with
/// |λ|^{-1/2} ≤ max_abs_alpha, sorted by (Re α, Im α).
std::vector<MagicCandidate> magics_from_spectrum(Model model, const std::vector<cplx>& spectrum,
                                                 double radius, double max_abs_alpha,
                                                 double cluster_tol = 1e-6);

/// Eigensolve T_k on the model's window and extract candidates. Throws
/// SingularShift when k is on the dual lattice.
std::vector<MagicCandidate> magics_from_T(Model model, const Potentials& pots, cplx k,
                                          double radius, double max_abs_alpha,
                                          double cluster_tol = 1e-6);

/// Fills cross_k_delta from Spec T_{k2}. `k` is the shift the candidates came
/// from; k2 must differ from it and from its ω-rotations.
std::vector<MagicCandidate> cross_validate(std::vector<MagicCandidate> cands, Model model,
                                           const Potentials& pots, cplx k, cplx k2,
                                           double radius);

/// Ladder acceptance threshold: 1e-8 up to max/2, log-linear to 1e-5 at max.
double ladder_threshold(double abs_alpha, double max_abs_alpha);

/// Extracts candidates up to extract_factor·max_abs_alpha at every radius and
/// matches the final list against the previous radius (nearest α within
/// 1e-3). Throws InputError for fewer than two radii.
std::vector<MagicCandidate> radius_ladder(Model model, const Potentials& pots, cplx k,
                                          const std::vector<double>& radii, double max_abs_alpha,
                                          double cluster_tol = 1e-6, double extract_factor = 1.5);

/// σ_min(Q(α,k'))/scale on a window of the given radius (scalar Q or the
/// invariant block of D(α)+k' on the chiral sector).
double flat_residual(Model model, const Potentials& pots, cplx alpha, cplx k_prime, double radius);

struct Spacing {
  double alpha = 0.0;
  double delta = 0.0;
};

/// Real (|Im α| < 1e-6), converged, reliable candidates sorted ascending and
/// their first differences. Empty with fewer than two.
std::vector<Spacing> real_magic_spacings(const std::vector<MagicCandidate>& cands);

struct MagicSearchConfig {
  Model model = Model::Scalar;
  /// Absolute radii, ascending.
  std::vector<double> radii;
  cplx k{0.0, 1.0};
  cplx k2{1.0, 0.5};
  cplx k_residual{0.3, -0.7};
  double max_abs_alpha = 8.0;
  double cluster_tol = 1e-6;
  double cross_tol = 1e-6;
  double flat_tol = 1e-6;
  double extract_factor = 1.5;
};

/// Defaults: radii {8,12,16,20}·4π/√3; max |α| 8 (scalar) or 10 (chiral).
MagicSearchConfig default_search_config(Model model);

struct MagicSearchResult {
  std::vector<MagicCandidate> candidates;
  std::vector<Spacing> spacings;
};

/// Ladder, cross-k validation and residuals; sets converged/unreliable.
MagicSearchResult find_magics(const Potentials& pots, const MagicSearchConfig& config);

}  // namespace flatbands
