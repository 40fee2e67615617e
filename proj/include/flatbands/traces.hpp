#pragma once
/*! \file
    \brief tr T_k^p by closed-loop lattice sums and by eigenvalue sums.

    Scalar: tr T_k^p = Σ Π_i (γ_i + k)⁻² V̂(γ_i − γ_{i+1}) over closed p-loops
    of Λ* modes. Chiral: the loops have 2p steps on Γ*, alternating U(−z) and
    U(z) hops, with a factor (γ + k)⁻¹ at each vertex. Both are truncated to
    loops whose vertices all lie in the window, which makes the lattice sum
    equal to tr of the p-th power of the truncated matrix.
*/

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flatbands/magic.hpp"
#include "flatbands/operators.hpp"

namespace flatbands {

enum class TraceMethod { LatticeSum, EigenSum };

std::string to_string(TraceMethod method);

struct TraceResult {
  Model model = Model::Scalar;
  int p = 2;
  cplx k;
  cplx value;
  /// Upper estimate of |tr T_k^p − value| from loops leaving the window.
  double tail_bound = 0.0;
  TraceMethod method = TraceMethod::LatticeSum;
  double radius = 0.0;
};

/// Throws InputError for p < 2 and SingularShift for k on the dual lattice.
TraceResult trace_power_lattice(Model model, const Potentials& pots, cplx k, int p, double radius);

/// The p = 1 loop sum. Zero for the scalar model since V̂(0) = 0. Test hook.
cplx trace_first_power_lattice(Model model, const Potentials& pots, cplx k, double radius);

/// Σ λ^p over Spec of the truncated T_k (tail_bound left at 0).
TraceResult trace_power_eig(Model model, const Potentials& pots, cplx k, int p, double radius);

/// Default cap on p: loop counts grow like 6^p (scalar) or 9^p (chiral).
inline constexpr int max_trace_power = 4;

struct RationalProbe {
  std::int64_t num = 0;
  std::int64_t den = 1;
  /// |x/unit − num/den|.
  double residual = 0.0;
};

inline const double pi_over_sqrt3 = std::numbers::pi / std::numbers::sqrt3;

/// Best continued-fraction approximant num/den (den ≤ max_den) of x/unit,
/// returned only when it is within 1e-6.
std::optional<RationalProbe> rational_probe(double x, double unit = pi_over_sqrt3,
                                            std::int64_t max_den = 1000);

struct SumRuleReport {
  cplx trace;
  /// Σ multiplicity·λ² over converged candidates with |α| ≤ max_abs_alpha.
  cplx converged_sum;
  /// Σ λ² over the rest of the truncated spectrum.
  cplx unconverged_mass;
  double gap = 0.0;
  double relative_gap = 0.0;
  double max_abs_alpha = 0.0;
};

/// Compares tr T_k² with the weight of resolved magics. `cands` should come
/// from the same k and radius.
SumRuleReport sum_rule_check(Model model, const Potentials& pots, cplx k, double radius,
                             const std::vector<MagicCandidate>& cands, double max_abs_alpha);

}  // namespace flatbands
