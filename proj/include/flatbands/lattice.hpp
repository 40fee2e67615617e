#pragma once
/*! \file
    \brief Hexagonal lattice Λ = ωZ ⊕ Z, the refinement Γ = 3Λ and their duals.

    Points of every lattice in the family are written scale·(m·ω + n) with
    integer (m, n), so a single integer pair type indexes all four of them.
    The squared length |m·ω + n|² = m² − mn + n² is an integer, which gives an
    exact canonical ordering of modes.
*/

#include <complex>
#include <compare>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <utility>
#include <vector>

namespace flatbands {

using cplx = std::complex<double>;

enum class LatticeKind { Lambda, Gamma3Lambda, LambdaStar, GammaStar };

std::string_view to_string(LatticeKind kind);

/// ω = e^{2πi/3}, built from its exact components.
inline const cplx omega{-0.5, std::numbers::sqrt3 / 2.0};
inline const cplx omega2{-0.5, -std::numbers::sqrt3 / 2.0};

/// |shortest vector of Λ*| = 4π/√3; the natural inverse-length unit.
inline constexpr double dual_unit = 4.0 * std::numbers::pi / std::numbers::sqrt3;

/// ⟨z, w⟩ = Re(z·w̄).
inline double pairing(cplx z, cplx w) { return (z * std::conj(w)).real(); }

/// Integer coordinates of a lattice point: point = scale·(m·ω + n).
struct ModeIndex {
  std::int64_t m = 0;
  std::int64_t n = 0;

  friend bool operator==(const ModeIndex&, const ModeIndex&) = default;

  ModeIndex operator+(ModeIndex o) const { return {m + o.m, n + o.n}; }
  ModeIndex operator-(ModeIndex o) const { return {m - o.m, n - o.n}; }
  ModeIndex operator-() const { return {-m, -n}; }
  ModeIndex operator*(std::int64_t s) const { return {m * s, n * s}; }

  /// |m·ω + n|², exact.
  std::int64_t norm2() const { return m * m - m * n + n * n; }
};

/// Canonical order: |point| ascending, then (m, n) lexicographic.
struct CanonicalLess {
  bool operator()(const ModeIndex& a, const ModeIndex& b) const {
    const auto na = a.norm2();
    const auto nb = b.norm2();
    if (na != nb) return na < nb;
    return std::pair{a.m, a.n} < std::pair{b.m, b.n};
  }
};

class LatticeSpec {
 public:
  explicit LatticeSpec(LatticeKind kind);

  static LatticeSpec lambda() { return LatticeSpec(LatticeKind::Lambda); }
  static LatticeSpec gamma() { return LatticeSpec(LatticeKind::Gamma3Lambda); }
  static LatticeSpec lambda_star() { return LatticeSpec(LatticeKind::LambdaStar); }
  static LatticeSpec gamma_star() { return LatticeSpec(LatticeKind::GammaStar); }

  LatticeKind kind() const { return kind_; }
  bool is_dual() const {
    return kind_ == LatticeKind::LambdaStar || kind_ == LatticeKind::GammaStar;
  }
  /// The complex factor s with point = s·(mω + n).
  cplx scale() const { return scale_; }
  /// Basis vectors b1 = s·ω, b2 = s.
  cplx b1() const { return scale_ * omega; }
  cplx b2() const { return scale_; }
  /// Length of the shortest nonzero vector.
  double shortest() const { return std::abs(scale_); }
  /// Area of a fundamental cell.
  double cell_area() const { return std::norm(scale_) * std::numbers::sqrt3 / 2.0; }
  /// The dual of this lattice (Λ ↔ Λ*, Γ ↔ Γ*).
  LatticeSpec dual() const;

  friend bool operator==(const LatticeSpec& a, const LatticeSpec& b) { return a.kind_ == b.kind_; }

 private:
  LatticeKind kind_;
  cplx scale_;
};

cplx mode_to_point(const LatticeSpec& spec, ModeIndex idx);

/// Real coordinates (x, y) with point = scale·(x·ω + y).
std::pair<double, double> point_to_coords(const LatticeSpec& spec, cplx z);

/// Every mode with |point + shift| ≤ radius, canonically sorted.
std::vector<ModeIndex> truncated_modes(const LatticeSpec& spec, double radius, cplx shift);

struct NearestPoint {
  ModeIndex index;
  double distance = 0.0;
};

/// Closest lattice point to k; ties broken by canonical order.
NearestPoint nearest_dual_point(cplx k, const LatticeSpec& spec);

/// Index of ω^power·point(idx).
ModeIndex rotate_mode(ModeIndex idx, int power);

/// Γ* index of a Λ* mode (Λ* = 3Γ*).
inline ModeIndex lambda_star_to_gamma_star(ModeIndex idx) { return idx * 3; }

/// Distance from k to the nearest lattice point other than its own nearest
/// point when k is on the lattice (the "next relevant" point for contours).
double distance_to_other_point(cplx k, const LatticeSpec& spec);

}  // namespace flatbands
