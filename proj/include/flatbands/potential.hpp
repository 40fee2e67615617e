#pragma once
/*! \file
    \brief Trigonometric polynomials f(z) = Σ_q c_q e^{i⟨z,q⟩} on a dual lattice.

    Houses the Bistritzer–MacDonald potential U, V(z) = U(z)U(−z) and
    V₁ = 2D_zbar U. All algebra acts on coefficients; there is no sampling.
*/

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>

#include "flatbands/lattice.hpp"

namespace flatbands {

class TrigPolynomial {
 public:
  using CoeffMap = std::map<ModeIndex, cplx, CanonicalLess>;

  /// Zero polynomial on a dual lattice. Throws InputError for a direct lattice.
  explicit TrigPolynomial(LatticeSpec lattice);

  static TrigPolynomial constant(LatticeSpec lattice, cplx value);

  const LatticeSpec& lattice() const { return lattice_; }
  const CoeffMap& coefficients() const { return coeffs_; }

  cplx coeff(ModeIndex idx) const;
  /// Sets a coefficient; an exact zero removes the mode.
  void set(ModeIndex idx, cplx value);
  void add(ModeIndex idx, cplx value) { set(idx, coeff(idx) + value); }

  bool empty() const { return coeffs_.empty(); }
  std::size_t size() const { return coeffs_.size(); }
  /// max_q |c_q|, 0 for the zero polynomial.
  double max_abs() const;

  TrigPolynomial scaled(cplx s) const;
  TrigPolynomial operator+(const TrigPolynomial& other) const;

  friend bool operator==(const TrigPolynomial& a, const TrigPolynomial& b) {
    return a.lattice_ == b.lattice_ && a.coeffs_ == b.coeffs_;
  }

 private:
  LatticeSpec lattice_;
  CoeffMap coeffs_;
};

/// U(z) = −(4/3)πi Σ_ℓ ω^ℓ e^{i⟨z, ω^ℓ K⟩}, K = 4π/3, on Γ*.
TrigPolynomial bm_potential_U();

/// Γ* index of K = 4π/3.
inline constexpr ModeIndex k_point_index{-2, -1};

/// Re-expresses a Λ* polynomial on Γ*; Γ* input is returned unchanged.
TrigPolynomial to_gamma_star(const TrigPolynomial& f);

/// Re-expresses a Γ* polynomial on Λ*. Throws InputError if some mode is not
/// in Λ*, i.e. the function is not Λ-periodic.
TrigPolynomial to_lambda_star(const TrigPolynomial& f);

/// Coefficient convolution. Mixed Λ*/Γ* inputs are multiplied on Γ*.
/// Coefficients that cancel to rounding level are stored as exact zeros.
TrigPolynomial multiply(const TrigPolynomial& f, const TrigPolynomial& g);

/// z ↦ f(−z).
TrigPolynomial reflect(const TrigPolynomial& f);

/// z ↦ f(ω^power z).
TrigPolynomial rotate(const TrigPolynomial& f, int power);

/// 2D_zbar = (1/i)(∂x₁ + i∂x₂), diagonal with eigenvalue q on e^{i⟨z,q⟩}.
TrigPolynomial apply_2Dzbar(const TrigPolynomial& f);

cplx evaluate(const TrigPolynomial& f, cplx z);

/// Index of the complex conjugate point q̄ on the same lattice.
ModeIndex conj_mode(const LatticeSpec& spec, ModeIndex idx);

struct SymmetryReport {
  bool translation = false;  // U(z+γ) = e^{i⟨γ,K⟩}U(z): support ⊂ K + Λ*
  bool rotation = false;     // U(ωz) = ωU(z)
  bool conjugation = false;  // conj(U(z̄)) = −U(−z)
  double rotation_defect = 0.0;
  double conjugation_defect = 0.0;

  bool all() const { return translation && rotation && conjugation; }
};

/// Coefficient-level check of the three identities required of U. Defects
/// are relative to max|c_q|; `rel_tol` is the rounding allowance.
SymmetryReport check_U_symmetries(const TrigPolynomial& u, double rel_tol = 1e-13);

/// Everything the operators need, derived once from U.
struct Potentials {
  TrigPolynomial u;        // U on Γ*
  TrigPolynomial u_ref;    // U(−z) on Γ*
  TrigPolynomial v;        // V = U(z)U(−z) on Λ*
  TrigPolynomial v_gamma;  // V on Γ*
  TrigPolynomial v1;       // 2D_zbar U on Γ*
  TrigPolynomial v1_ref;   // 2D_zbar [U(−z)] on Γ*
};

/// Throws InputError when V does not land on Λ*.
Potentials make_potentials(const TrigPolynomial& u);

/// Parses `m n re im` lines (`#` comments, blank lines ignored) on the given
/// dual lattice. Duplicate modes and malformed lines throw InputError.
TrigPolynomial parse_potential(std::istream& in, LatticeSpec lattice);
TrigPolynomial read_potential_file(const std::filesystem::path& path, LatticeSpec lattice);

/// FNV-1a hash of the canonical coefficient listing; stable across runs.
std::uint64_t fingerprint(const TrigPolynomial& f);

}  // namespace flatbands
