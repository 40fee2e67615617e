#pragma once
/*! \file
    \brief Dense complex linear algebra: nonsymmetric eigenvalues, singular
    values and log-derivative traces. Backed by LAPACK.
*/

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "flatbands/lattice.hpp"

namespace flatbands {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct SpectrumResult {
  /// Sorted by descending modulus, then descending real part.
  std::vector<cplx> eigenvalues;
  /// ‖(A − λI)v‖ / ‖A‖_F per eigenpair; empty unless requested.
  std::vector<double> residuals;
};

/// Canonical eigenvalue order used everywhere downstream.
void sort_canonical(std::vector<cplx>& values);

/// Full spectrum of a square matrix. Throws EigenNonConvergence when the QR
/// iteration fails and InputError for non-square or non-finite input.
SpectrumResult eigenvalues(const Matrix& a, bool with_residuals = false);

/// All singular values, descending.
std::vector<double> singular_values(const Matrix& a);

/// The `count` smallest singular values, ascending.
std::vector<double> smallest_singular_values(const Matrix& a, std::size_t count);

/// Upper estimate of σ_min by inverse iteration on AᴴA (one LU, a few
/// triangular solves). Returns 0 for an exactly singular factorization.
double sigma_min_estimate(const Matrix& a, int iterations = 12);

/// tr(A⁻¹·dA). Throws NearSingular if the 1-norm condition estimate of A
/// exceeds `cond_threshold`.
cplx logderiv_trace(const Matrix& a, const Matrix& da, double cond_threshold = 1e13);

}  // namespace flatbands
