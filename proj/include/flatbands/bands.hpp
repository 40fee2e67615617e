#pragma once
/*! \file
    \brief Bloch bands of H(α,k) as singular values of Q(α,k).

    H(α,k) = [[0, Q*],[Q, 0]] has spectrum ±σ_j(Q(α,k)), so the doubled
    Hermitian matrix is never formed. A flat band at zero energy means
    σ_min(Q(α,k)) = 0 for every k.
*/

#include <string>
#include <vector>

#include "flatbands/operators.hpp"

namespace flatbands {

enum class KSetKind { Grid, Path };

struct KSet {
  KSetKind kind = KSetKind::Grid;
  std::vector<cplx> points;
  /// Grid: n per side. Path: samples per segment.
  int resolution = 0;
  /// Path waypoints (empty for a grid).
  std::vector<cplx> waypoints;
};

/// n×n points (i/n)·b1 + (j/n)·b2 over one fundamental cell of `lattice`.
KSet make_grid(const LatticeSpec& lattice, int n);
/// Straight segments between waypoints, `samples` points per segment, with
/// the final waypoint appended.
KSet make_path(const std::vector<cplx>& waypoints, int samples);
/// 0 → (b1 + 2b2)/3 → b2/2 → 0 in the given lattice, 48 samples per segment.
KSet default_band_path(const LatticeSpec& lattice, int samples = 48);

struct BandSweep {
  Model model = Model::Scalar;
  cplx alpha;
  KSet kset;
  /// Per k, the n smallest singular values, ascending.
  std::vector<std::vector<double>> energies;
  double window_radius = 0.0;
  double scale = 1.0;
};

/// Windows are re-centred at each k. Throws InputError when n_bands exceeds
/// the window size.
BandSweep band_sweep(Model model, const Potentials& pots, cplx alpha, const KSet& kset,
                     int n_bands, double window_radius);

struct FlatBandCheck {
  bool is_flat = false;
  double max_sigma_min = 0.0;
  cplx argmax_k;
  double scale = 1.0;
  double tol = 0.0;
};

/// is_flat ⟺ max_k σ_min(Q(α,k)) < tol·scale over a grid.
FlatBandCheck flat_band_check(Model model, const Potentials& pots, cplx alpha, const KSet& grid,
                              double tol, double window_radius);

struct OneKReport {
  double sigma_k0 = 0.0;
  double max_sigma_grid = 0.0;
  bool below_k0 = false;
  bool below_grid = false;
  bool consistent = false;
  double scale = 1.0;
};

/// σ_min at a single k0 off the dual lattice against the grid maximum.
/// Throws SingularShift when k0 is on the lattice.
OneKReport one_k_equivalence(Model model, const Potentials& pots, cplx alpha, cplx k0,
                             const KSet& grid, double tol, double window_radius);

/// `k_re,k_im,band_index,energy` rows, one per (k, band).
std::string bands_csv(const BandSweep& sweep);

}  // namespace flatbands
