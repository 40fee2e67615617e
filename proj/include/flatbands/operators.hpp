#pragma once
/*! \file
    \brief Galerkin (Fourier-truncated) matrices of the scalar and chiral
    operators.

    A BasisWindow fixes the plane waves e^{i⟨z,γ⟩} kept in the compression;
    the Bloch parameter k passed to an assembler only enters the diagonal, so
    a contour in k can share one window.

    Scalar family on Λ*:  Q(α,k) = (2D_zbar + k)² − α²V,  T_k = (2D_zbar + k)⁻² V.
    Chiral family on Γ*:  D(α) + k = [[2D_zbar + k, αU(z)], [αU(−z), 2D_zbar + k]],
                          T_k = (2D_zbar + k)⁻¹ U(z) (2D_zbar + k)⁻¹ U(−z).
*/

#include <string>
#include <unordered_map>
#include <vector>

#include "flatbands/eig.hpp"
#include "flatbands/lattice.hpp"
#include "flatbands/potential.hpp"

namespace flatbands {

enum class Model { Scalar, Chiral };

std::string to_string(Model model);
Model parse_model(const std::string& text);

/// The dual lattice a model's plane waves live on.
inline LatticeSpec model_lattice(Model model) {
  return model == Model::Scalar ? LatticeSpec::lambda_star() : LatticeSpec::gamma_star();
}

struct ModeHash {
  std::size_t operator()(const ModeIndex& idx) const noexcept {
    return std::hash<std::int64_t>{}(idx.m * 0x9E3779B97F4A7C15LL ^ idx.n);
  }
};

struct BasisWindow {
  LatticeSpec lattice = LatticeSpec::lambda_star();
  cplx shift;
  double radius = 0.0;
  std::vector<ModeIndex> modes;
  /// Empty for a full window; "chiral-sector" for the coset-restricted window.
  std::string sector;

  std::size_t size() const { return modes.size(); }
  /// Position of a mode in `modes`, or -1.
  std::ptrdiff_t find(ModeIndex idx) const;
  /// Builds the lookup table; called by the factory functions.
  void index();

 private:
  std::unordered_map<ModeIndex, std::ptrdiff_t, ModeHash> lookup_;
};

/// truncated_modes(lattice, radius, shift). Throws InputError if empty.
BasisWindow make_window(LatticeSpec lattice, double radius, cplx shift);

/// Γ* window keeping only the two cosets Λ* and Λ* − K. T_chiral maps the Λ*
/// coset to itself through the Λ* − K coset, so its spectrum on this window
/// is one copy of the chiral Birman–Schwinger spectrum (a full Γ* window
/// holds nine coset copies).
BasisWindow make_chiral_sector_window(double radius, cplx shift);

/// True for Γ* modes in the Λ* coset.
inline bool in_lambda_star_coset(ModeIndex idx) { return idx.m % 3 == 0 && idx.n % 3 == 0; }

enum class OperatorLabel { ScalarQ, ScalarQdZeta, ChiralD, ProductP, TScalar, TChiral };

std::string to_string(OperatorLabel label);

struct OperatorMatrix {
  OperatorLabel label = OperatorLabel::ScalarQ;
  BasisWindow window;
  /// Modes indexing each component block (the window modes, or the Λ*
  /// coset for a chiral-sector T).
  std::vector<ModeIndex> basis;
  int components = 1;
  Matrix entries;

  Eigen::Index dim() const { return entries.rows(); }
};

/// entry[γ,γ'] = f̂(γ − γ') for γ ∈ rows, γ' ∈ cols (f on the window lattice).
Matrix multiplication_matrix(const TrigPolynomial& f, const BasisWindow& window);

OperatorMatrix assemble_scalar_Q(const Potentials& pots, cplx alpha, cplx k, const BasisWindow& w);
OperatorMatrix assemble_scalar_Q_dzeta(cplx k, const BasisWindow& w);
OperatorMatrix assemble_chiral_D(const Potentials& pots, cplx alpha, cplx k, const BasisWindow& w);
OperatorMatrix assemble_P(const Potentials& pots, cplx alpha, cplx k, const BasisWindow& w);

/// Default SingularShift threshold, relative to the shortest dual vector.
inline constexpr double singular_shift_rel = 1e-8;

/// Throws SingularShift if some |γ + k| < rel·|shortest vector|.
void require_regular_shift(cplx k, const BasisWindow& w, double rel = singular_shift_rel);

OperatorMatrix assemble_T_scalar(const Potentials& pots, cplx k, const BasisWindow& w,
                                 double shift_rel = singular_shift_rel);

/// On a full Γ* window or a chiral-sector window. For the sector the
/// returned matrix is restricted to its invariant Λ*-coset block.
OperatorMatrix assemble_T_chiral(const Potentials& pots, cplx k, const BasisWindow& w,
                                 double shift_rel = singular_shift_rel);

/// Model dispatch: scalar T on a Λ* window, chiral T on its sector window.
OperatorMatrix assemble_T(Model model, const Potentials& pots, cplx k, double radius);

/// σ-threshold scale: |α|²·max|V̂| + (4π/√3)² (scalar), |α|·max|Û| + 4π/√3 (chiral).
double operator_scale(Model model, const Potentials& pots, cplx alpha);

}  // namespace flatbands
