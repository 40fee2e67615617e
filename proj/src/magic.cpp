#include "flatbands/magic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flatbands/errors.hpp"
#include "flatbands/parallel.hpp"

namespace flatbands {

namespace {

bool alpha_less(const MagicCandidate& a, const MagicCandidate& b) {
  if (a.alpha.real() != b.alpha.real()) return a.alpha.real() < b.alpha.real();
  return a.alpha.imag() < b.alpha.imag();
}

std::vector<cplx> spectrum_of_T(Model model, const Potentials& pots, cplx k, double radius) {
  return eigenvalues(assemble_T(model, pots, k, radius).entries).eigenvalues;
}

// Invariant block of D(α)+k on the chiral sector: component 1 on the Λ*
// coset, component 2 on the Λ* − K coset.
Matrix chiral_block(const Potentials& pots, cplx alpha, cplx k, double radius) {
  const BasisWindow w = make_chiral_sector_window(radius, k);
  const Matrix d = assemble_chiral_D(pots, alpha, k, w).entries;
  const auto n = static_cast<Eigen::Index>(w.size());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (in_lambda_star_coset(w.modes[static_cast<std::size_t>(i)])) keep.push_back(i);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!in_lambda_star_coset(w.modes[static_cast<std::size_t>(i)])) keep.push_back(n + i);
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  Matrix out(m, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index r = 0; r < m; ++r) {
      out(r, c) = d(keep[static_cast<std::size_t>(r)], keep[static_cast<std::size_t>(c)]);
    }
  }
  return out;
}

}  // namespace

cplx alpha_from_lambda(cplx lambda) {
  if (lambda == cplx{}) throw InputError("lambda = 0 has no magic parameter");
  cplx a = 1.0 / std::sqrt(lambda);
  if (std::abs(a.real()) <= 1e-13 * std::abs(a)) a = {0.0, std::abs(a.imag())};
  if (a.real() < 0.0) a = -a;
  return a;
}

std::vector<MagicCandidate> magics_from_spectrum(Model model, const std::vector<cplx>& spectrum,
                                                 double radius, double max_abs_alpha,
                                                 double cluster_tol) {
  const double min_abs_lambda = 1.0 / (max_abs_alpha * max_abs_alpha);
  std::vector<cplx> kept;
  for (const cplx l : spectrum) {
    if (l != cplx{} && std::abs(l) >= min_abs_lambda) kept.push_back(l);
  }
  sort_canonical(kept);

  // Single-linkage clusters in relative distance.
  std::vector<int> label(kept.size(), -1);
  int clusters = 0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (label[i] >= 0) continue;
    label[i] = clusters;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < kept.size(); ++b) {
        if (label[b] >= 0) continue;
        const double scale = std::max(std::abs(kept[a]), std::abs(kept[b]));
        if (std::abs(kept[a] - kept[b]) <= cluster_tol * scale) {
          label[b] = clusters;
          stack.push_back(b);
        }
      }
    }
    ++clusters;
  }

  std::vector<MagicCandidate> out(static_cast<std::size_t>(clusters));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    auto& c = out[static_cast<std::size_t>(label[i])];
    c.lambda += kept[i];
    c.multiplicity += 1;
  }
  for (auto& c : out) {
    c.multiplicity -= 1;
    c.lambda /= static_cast<double>(c.multiplicity);
    c.alpha = alpha_from_lambda(c.lambda);
    c.model = model;
    c.radius = radius;
  }
  std::sort(out.begin(), out.end(), alpha_less);
  return out;
}

std::vector<MagicCandidate> magics_from_T(Model model, const Potentials& pots, cplx k,
                                          double radius, double max_abs_alpha,
                                          double cluster_tol) {
  return magics_from_spectrum(model, spectrum_of_T(model, pots, k, radius), radius, max_abs_alpha,
                              cluster_tol);
}

std::vector<MagicCandidate> cross_validate(std::vector<MagicCandidate> cands, Model model,
                                           const Potentials& pots, cplx k, cplx k2,
                                           double radius) {
  if (cands.empty()) return cands;
  const double tiny = 1e-9 * dual_unit;
  for (int p = 0; p < 3; ++p) {
    if (std::abs(k2 - std::pow(omega, p) * k) < tiny) {
      throw InputError("k2 coincides with k or a rotation of k; spectra would agree by symmetry");
    }
  }
  const auto spec = spectrum_of_T(model, pots, k2, radius);
  for (auto& c : cands) {
    double best = std::numeric_limits<double>::infinity();
    for (const cplx mu : spec) best = std::min(best, std::abs(c.lambda - mu));
    c.cross_k_delta = best / std::abs(c.lambda);
  }
  return cands;
}

double ladder_threshold(double abs_alpha, double max_abs_alpha) {
  const double half = 0.5 * max_abs_alpha;
  if (abs_alpha <= half) return 1e-8;
  const double t = std::min(1.0, (abs_alpha - half) / half);
  return std::pow(10.0, -8.0 + 3.0 * t);
}

std::vector<MagicCandidate> radius_ladder(Model model, const Potentials& pots, cplx k,
                                          const std::vector<double>& radii, double max_abs_alpha,
                                          double cluster_tol, double extract_factor) {
  if (radii.size() < 2) throw InputError("radius ladder needs at least two radii");
  if (!std::is_sorted(radii.begin(), radii.end())) {
    throw InputError("radius ladder must be ascending");
  }
  std::vector<std::vector<MagicCandidate>> levels(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) {
    levels[i] = magics_from_T(model, pots, k, radii[i], extract_factor * max_abs_alpha, cluster_tol);
  });

  auto out = levels.back();
  const auto& prev = levels[levels.size() - 2];
  for (auto& c : out) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : prev) best = std::min(best, std::abs(c.alpha - p.alpha));
    c.ladder_delta = best < 1e-3 ? best : std::numeric_limits<double>::infinity();
    c.unreliable = std::abs(c.alpha) > max_abs_alpha ||
                   !(c.ladder_delta < ladder_threshold(std::abs(c.alpha), max_abs_alpha));
  }
  return out;
}

double flat_residual(Model model, const Potentials& pots, cplx alpha, cplx k_prime, double radius) {
  const double scale = operator_scale(model, pots, alpha);
  if (model == Model::Scalar) {
    const BasisWindow w = make_window(LatticeSpec::lambda_star(), radius, k_prime);
    return sigma_min_estimate(assemble_scalar_Q(pots, alpha, k_prime, w).entries) / scale;
  }
  return sigma_min_estimate(chiral_block(pots, alpha, k_prime, radius)) / scale;
}

std::vector<Spacing> real_magic_spacings(const std::vector<MagicCandidate>& cands) {
  std::vector<double> reals;
  for (const auto& c : cands) {
    if (std::abs(c.alpha.imag()) < 1e-6 && c.converged && !c.unreliable) {
      reals.push_back(c.alpha.real());
    }
  }
  std::sort(reals.begin(), reals.end());
  std::vector<Spacing> out;
  for (std::size_t i = 0; i + 1 < reals.size(); ++i) out.push_back({reals[i], reals[i + 1] - reals[i]});
  return out;
}

MagicSearchConfig default_search_config(Model model) {
  MagicSearchConfig c;
  c.model = model;
  c.radii = {8.0 * dual_unit, 12.0 * dual_unit, 16.0 * dual_unit, 20.0 * dual_unit};
  c.max_abs_alpha = model == Model::Scalar ? 8.0 : 10.0;
  return c;
}

MagicSearchResult find_magics(const Potentials& pots, const MagicSearchConfig& config) {
  if (config.radii.size() < 2) throw InputError("radius ladder needs at least two radii");
  if (!(config.max_abs_alpha > 0.0)) throw InputError("max_abs_alpha must be positive");
  auto cands = radius_ladder(config.model, pots, config.k, config.radii, config.max_abs_alpha,
                             config.cluster_tol, config.extract_factor);
  cands = cross_validate(std::move(cands), config.model, pots, config.k, config.k2,
                         config.radii.back());

  // σ_min only where it can still change the verdict. The residual window
  // grows with |α| (eigenfunctions spread in Fourier space) up to the last
  // ladder radius.
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (!cands[i].unreliable && cands[i].cross_k_delta < config.cross_tol) todo.push_back(i);
  }
  parallel_for(todo.size(), [&](std::size_t t) {
    auto& c = cands[todo[t]];
    const double units = std::max(1.5 * std::abs(c.alpha) + 5.0, 8.0);
    const double radius = std::min(units * dual_unit, config.radii.back());
    c.residual = flat_residual(config.model, pots, c.alpha, config.k_residual, radius);
  });

  for (auto& c : cands) {
    c.converged = !c.unreliable && c.cross_k_delta < config.cross_tol && c.residual < config.flat_tol;
    c.unreliable = c.unreliable || !c.converged;
  }
  MagicSearchResult result;
  result.spacings = real_magic_spacings(cands);
  result.candidates = std::move(cands);
  return result;
}

}  // namespace flatbands
