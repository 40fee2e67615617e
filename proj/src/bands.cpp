#include "flatbands/bands.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "flatbands/errors.hpp"
#include "flatbands/parallel.hpp"

namespace flatbands {

namespace {

Matrix q_at(Model model, const Potentials& pots, cplx alpha, cplx k, double radius) {
  const BasisWindow w = make_window(model_lattice(model), radius, k);
  return model == Model::Scalar ? assemble_scalar_Q(pots, alpha, k, w).entries
                                : assemble_chiral_D(pots, alpha, k, w).entries;
}

double sigma_min_at(Model model, const Potentials& pots, cplx alpha, cplx k, double radius) {
  return smallest_singular_values(q_at(model, pots, alpha, k, radius), 1).front();
}

std::vector<double> sigma_min_over(Model model, const Potentials& pots, cplx alpha,
                                   const KSet& ks, double radius) {
  std::vector<double> out(ks.points.size());
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = sigma_min_at(model, pots, alpha, ks.points[i], radius);
  });
  return out;
}

}  // namespace

KSet make_grid(const LatticeSpec& lattice, int n) {
  if (n < 1) throw InputError("grid size must be positive");
  KSet ks;
  ks.kind = KSetKind::Grid;
  ks.resolution = n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      ks.points.push_back(static_cast<double>(i) / n * lattice.b1() +
                          static_cast<double>(j) / n * lattice.b2());
    }
  }
  return ks;
}

KSet make_path(const std::vector<cplx>& waypoints, int samples) {
  if (waypoints.size() < 2) throw InputError("a path needs at least two waypoints");
  if (samples < 1) throw InputError("samples per segment must be positive");
  KSet ks;
  ks.kind = KSetKind::Path;
  ks.resolution = samples;
  ks.waypoints = waypoints;
  for (std::size_t s = 0; s + 1 < waypoints.size(); ++s) {
    for (int j = 0; j < samples; ++j) {
      const double t = static_cast<double>(j) / samples;
      ks.points.push_back((1.0 - t) * waypoints[s] + t * waypoints[s + 1]);
    }
  }
  ks.points.push_back(waypoints.back());
  return ks;
}

KSet default_band_path(const LatticeSpec& lattice, int samples) {
  const cplx k_pt = (lattice.b1() + 2.0 * lattice.b2()) / 3.0;
  const cplx m_pt = lattice.b2() / 2.0;
  return make_path({0.0, k_pt, m_pt, 0.0}, samples);
}

BandSweep band_sweep(Model model, const Potentials& pots, cplx alpha, const KSet& kset,
                     int n_bands, double window_radius) {
  if (kset.points.empty()) throw InputError("empty k set");
  if (n_bands < 1) throw InputError("n_bands must be positive");
  BandSweep out;
  out.model = model;
  out.alpha = alpha;
  out.kset = kset;
  out.window_radius = window_radius;
  out.scale = operator_scale(model, pots, alpha);
  out.energies.resize(kset.points.size());
  parallel_for(kset.points.size(), [&](std::size_t i) {
    const Matrix q = q_at(model, pots, alpha, kset.points[i], window_radius);
    if (n_bands > q.rows()) {
      throw InputError("n_bands = " + std::to_string(n_bands) + " exceeds the window size " +
                       std::to_string(q.rows()));
    }
    out.energies[i] = smallest_singular_values(q, static_cast<std::size_t>(n_bands));
  });
  return out;
}

FlatBandCheck flat_band_check(Model model, const Potentials& pots, cplx alpha, const KSet& grid,
                              double tol, double window_radius) {
  if (grid.kind != KSetKind::Grid) throw InputError("flat_band_check needs a grid");
  if (grid.points.empty()) throw InputError("empty k set");
  const auto sig = sigma_min_over(model, pots, alpha, grid, window_radius);
  FlatBandCheck out;
  const auto it = std::max_element(sig.begin(), sig.end());
  out.max_sigma_min = *it;
  out.argmax_k = grid.points[static_cast<std::size_t>(it - sig.begin())];
  out.scale = operator_scale(model, pots, alpha);
  out.tol = tol;
  out.is_flat = out.max_sigma_min < tol * out.scale;
  return out;
}

OneKReport one_k_equivalence(Model model, const Potentials& pots, cplx alpha, cplx k0,
                             const KSet& grid, double tol, double window_radius) {
  const LatticeSpec lattice = model_lattice(model);
  if (nearest_dual_point(k0, lattice).distance < singular_shift_rel * lattice.shortest()) {
    throw SingularShift("k0 lies on the dual lattice");
  }
  const auto check = flat_band_check(model, pots, alpha, grid, tol, window_radius);
  OneKReport out;
  out.scale = check.scale;
  out.sigma_k0 = sigma_min_at(model, pots, alpha, k0, window_radius);
  out.max_sigma_grid = check.max_sigma_min;
  out.below_k0 = out.sigma_k0 < tol * out.scale;
  out.below_grid = check.is_flat;
  out.consistent = out.below_k0 == out.below_grid;
  return out;
}

std::string bands_csv(const BandSweep& sweep) {
  std::ostringstream os;
  os << "k_re,k_im,band_index,energy\n";
  char buf[128];
  for (std::size_t i = 0; i < sweep.kset.points.size(); ++i) {
    const cplx k = sweep.kset.points[i];
    for (std::size_t b = 0; b < sweep.energies[i].size(); ++b) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu,%.17g\n", k.real(), k.imag(), b,
                    sweep.energies[i][b]);
      os << buf;
    }
  }
  return os.str();
}

}  // namespace flatbands
