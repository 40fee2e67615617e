#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "flatbands/eig.hpp"
#include "flatbands/errors.hpp"

namespace flatbands {

namespace {

void require_square_finite(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw InputError(std::string(what) + ": matrix is not square");
  }
  if (!a.allFinite()) throw InputError(std::string(what) + ": non-finite entries");
}

lapack_int dim(const Matrix& a) { return static_cast<lapack_int>(a.rows()); }

bool canonical_before(cplx a, cplx b) {
  const double ma = std::abs(a);
  const double mb = std::abs(b);
  if (ma != mb) return ma > mb;
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

}  // namespace

void sort_canonical(std::vector<cplx>& values) {
  std::stable_sort(values.begin(), values.end(), canonical_before);
}

SpectrumResult eigenvalues(const Matrix& a, bool with_residuals) {
  require_square_finite(a, "eigenvalues");
  SpectrumResult out;
  const lapack_int n = dim(a);
  if (n == 0) return out;

  Matrix work = a;
  Vector w(n);
  Matrix vr;
  if (with_residuals) vr.resize(n, n);
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', with_residuals ? 'V' : 'N', n, work.data(), n, w.data(),
                    nullptr, 1, with_residuals ? vr.data() : nullptr, with_residuals ? n : 1);
  if (info > 0) {
    throw EigenNonConvergence("zgeev: QR iteration failed to converge (" + std::to_string(info) +
                              " eigenvalues unresolved)");
  }
  if (info < 0) throw Error("zgeev: illegal argument " + std::to_string(-info));

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<cplx> values(w.data(), w.data() + n);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return canonical_before(values[i], values[j]); });

  const double norm_a = a.norm();
  out.eigenvalues.reserve(order.size());
  for (auto i : order) {
    out.eigenvalues.push_back(values[i]);
    if (with_residuals) {
      const Vector v = vr.col(static_cast<Eigen::Index>(i));
      const double r = (a * v - values[i] * v).norm() / v.norm();
      out.residuals.push_back(norm_a > 0.0 ? r / norm_a : r);
    }
  }
  return out;
}

std::vector<double> singular_values(const Matrix& a) {
  require_square_finite(a, "singular_values");
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  if (m == 0) return {};
  Matrix work = a;
  std::vector<double> s(static_cast<std::size_t>(std::min(m, n)));
  const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, s.data(),
                                         nullptr, 1, nullptr, 1);
  if (info > 0) throw EigenNonConvergence("zgesdd: bidiagonal SVD failed to converge");
  if (info < 0) throw Error("zgesdd: illegal argument " + std::to_string(-info));
  return s;
}

std::vector<double> smallest_singular_values(const Matrix& a, std::size_t count) {
  auto s = singular_values(a);
  if (count > s.size()) throw InputError("smallest_singular_values: count exceeds dimension");
  std::reverse(s.begin(), s.end());
  s.resize(count);
  return s;
}

double sigma_min_estimate(const Matrix& a, int iterations) {
  require_square_finite(a, "sigma_min_estimate");
  const lapack_int n = dim(a);
  if (n == 0) return 0.0;
  Matrix lu = a;
  std::vector<lapack_int> piv(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lu.data(), n, piv.data());
  if (info > 0) return 0.0;
  if (info < 0) throw Error("zgetrf: illegal argument " + std::to_string(-info));

  Vector x(n);
  for (lapack_int i = 0; i < n; ++i) {
    const double t = 0.7 * i + 0.3;
    x(i) = cplx{1.0 + 0.5 * std::cos(t), 0.5 * std::sin(1.3 * t)};
  }
  x.normalize();
  double growth = 0.0;
  for (int it = 0; it < iterations; ++it) {
    // x ← A⁻¹ A⁻ᴴ x, the power iteration for (AᴴA)⁻¹.
    LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'C', n, 1, lu.data(), n, piv.data(), x.data(), n);
    LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, 1, lu.data(), n, piv.data(), x.data(), n);
    growth = x.norm();
    if (!std::isfinite(growth)) return 0.0;
    if (growth == 0.0) break;
    x /= growth;
  }
  return growth > 0.0 ? 1.0 / std::sqrt(growth) : 0.0;
}

cplx logderiv_trace(const Matrix& a, const Matrix& da, double cond_threshold) {
  require_square_finite(a, "logderiv_trace");
  if (da.rows() != a.rows() || da.cols() != a.cols()) {
    throw InputError("logderiv_trace: derivative has the wrong shape");
  }
  const lapack_int n = dim(a);
  if (n == 0) return {};
  Matrix lu = a;
  std::vector<lapack_int> piv(static_cast<std::size_t>(n));
  const double anorm = LAPACKE_zlange(LAPACK_COL_MAJOR, '1', n, n, lu.data(), n);
  const lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lu.data(), n, piv.data());
  if (info > 0) throw NearSingular("logderiv_trace: exactly singular factor");
  if (info < 0) throw Error("zgetrf: illegal argument " + std::to_string(-info));
  double rcond = 0.0;
  LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n, lu.data(), n, anorm, &rcond);
  if (!(rcond > 0.0) || 1.0 / rcond > cond_threshold) {
    throw NearSingular("logderiv_trace: condition estimate " +
                       std::to_string(rcond > 0.0 ? 1.0 / rcond : INFINITY) + " above threshold");
  }
  Matrix x = da;
  LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, n, lu.data(), n, piv.data(), x.data(), n);
  return x.trace();
}

}  // namespace flatbands
