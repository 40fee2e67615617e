#include "flatbands/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flatbands {

std::string_view to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::Lambda: return "Lambda";
    case LatticeKind::Gamma3Lambda: return "Gamma3Lambda";
    case LatticeKind::LambdaStar: return "LambdaStar";
    case LatticeKind::GammaStar: return "GammaStar";
  }
  return "?";
}

LatticeSpec::LatticeSpec(LatticeKind kind) : kind_(kind) {
  const cplx lambda_star_scale{0.0, dual_unit};  // 4πi/√3
  switch (kind) {
    case LatticeKind::Lambda: scale_ = 1.0; break;
    case LatticeKind::Gamma3Lambda: scale_ = 3.0; break;
    case LatticeKind::LambdaStar: scale_ = lambda_star_scale; break;
    case LatticeKind::GammaStar: scale_ = lambda_star_scale / 3.0; break;
  }
}

LatticeSpec LatticeSpec::dual() const {
  switch (kind_) {
    case LatticeKind::Lambda: return lambda_star();
    case LatticeKind::Gamma3Lambda: return gamma_star();
    case LatticeKind::LambdaStar: return lambda();
    case LatticeKind::GammaStar: return gamma();
  }
  return lambda();
}

cplx mode_to_point(const LatticeSpec& spec, ModeIndex idx) {
  return spec.scale() * (static_cast<double>(idx.m) * omega + static_cast<double>(idx.n));
}

std::pair<double, double> point_to_coords(const LatticeSpec& spec, cplx z) {
  const cplx w = z / spec.scale();
  const double x = w.imag() / (std::numbers::sqrt3 / 2.0);
  return {x, w.real() + x / 2.0};
}

std::vector<ModeIndex> truncated_modes(const LatticeSpec& spec, double radius, cplx shift) {
  std::vector<ModeIndex> out;
  if (!(radius > 0.0)) return out;
  // In coordinates w = point/scale the disc |point + shift| ≤ R becomes
  // |w − c| ≤ r with c = −shift/scale, r = R/|scale|.
  const cplx c = -shift / spec.scale();
  const double r = radius / spec.shortest();
  const double h = std::numbers::sqrt3 / 2.0;
  const auto m_lo = static_cast<std::int64_t>(std::floor((c.imag() - r) / h)) - 1;
  const auto m_hi = static_cast<std::int64_t>(std::ceil((c.imag() + r) / h)) + 1;
  for (auto m = m_lo; m <= m_hi; ++m) {
    // Re(w) = n − m/2
    const double centre = c.real() + 0.5 * static_cast<double>(m);
    const auto n_lo = static_cast<std::int64_t>(std::floor(centre - r)) - 1;
    const auto n_hi = static_cast<std::int64_t>(std::ceil(centre + r)) + 1;
    for (auto n = n_lo; n <= n_hi; ++n) {
      const ModeIndex idx{m, n};
      if (std::abs(mode_to_point(spec, idx) + shift) <= radius) out.push_back(idx);
    }
  }
  std::sort(out.begin(), out.end(), CanonicalLess{});
  return out;
}

NearestPoint nearest_dual_point(cplx k, const LatticeSpec& spec) {
  const auto [x, y] = point_to_coords(spec, k);
  const auto m0 = static_cast<std::int64_t>(std::llround(x));
  const auto n0 = static_cast<std::int64_t>(std::llround(y));
  NearestPoint best{{m0, n0}, std::numeric_limits<double>::infinity()};
  for (std::int64_t dm = -2; dm <= 2; ++dm) {
    for (std::int64_t dn = -2; dn <= 2; ++dn) {
      const ModeIndex idx{m0 + dm, n0 + dn};
      const double d = std::abs(k - mode_to_point(spec, idx));
      if (d < best.distance || (d == best.distance && CanonicalLess{}(idx, best.index))) {
        best = {idx, d};
      }
    }
  }
  return best;
}

ModeIndex rotate_mode(ModeIndex idx, int power) {
  power = ((power % 3) + 3) % 3;
  for (int i = 0; i < power; ++i) {
    // ω·(mω + n) = mω² + nω = (n − m)ω − m
    idx = {idx.n - idx.m, -idx.m};
  }
  return idx;
}

double distance_to_other_point(cplx k, const LatticeSpec& spec) {
  const auto nearest = nearest_dual_point(k, spec);
  if (nearest.distance <= 1e-12 * spec.shortest()) return spec.shortest();
  return nearest.distance;
}

}  // namespace flatbands
