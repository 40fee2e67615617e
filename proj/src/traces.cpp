#include "flatbands/traces.hpp"

#include <cmath>
#include <limits>

#include "flatbands/errors.hpp"
#include "flatbands/parallel.hpp"

namespace flatbands {

namespace {

struct Neumaier {
  double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0;
  static void add(double& s, double& c, double x) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  void operator+=(cplx z) {
    add(sr, cr, z.real());
    add(si, ci, z.imag());
  }
  cplx value() const { return {sr + cr, si + ci}; }
};

struct Hop {
  ModeIndex q;
  cplx c;
};

std::vector<Hop> hops(const TrigPolynomial& f) {
  std::vector<Hop> out;
  for (const auto& [q, c] : f.coefficients()) out.push_back({q, c});
  return out;
}

// Loops are walked column → row, matching the matrix product order.
struct LoopWalker {
  const BasisWindow& w;
  std::vector<cplx> inv;  // 1/(γ+k) per window mode
  std::vector<std::vector<Hop>> stages;
  int steps = 0;
  bool squared = false;  // scalar vertices carry (γ+k)⁻²

  void walk(std::ptrdiff_t start, std::ptrdiff_t cur, int depth, cplx weight, Neumaier& acc) const {
    const auto& stage = stages[static_cast<std::size_t>(depth) % stages.size()];
    const ModeIndex here = w.modes[static_cast<std::size_t>(cur)];
    for (const auto& h : stage) {
      const auto next = w.find(here + h.q);
      if (next < 0) continue;
      cplx f = inv[static_cast<std::size_t>(next)];
      if (squared) f *= f;
      const cplx wgt = weight * h.c * f;
      if (depth + 1 == steps) {
        if (next == start) acc += wgt;
      } else {
        walk(start, next, depth + 1, wgt, acc);
      }
    }
  }
};

cplx loop_sum(Model model, const Potentials& pots, cplx k, int p, double radius) {
  const BasisWindow w = model == Model::Scalar
                            ? make_window(LatticeSpec::lambda_star(), radius, k)
                            : make_chiral_sector_window(radius, k);
  require_regular_shift(k, w);
  LoopWalker walker{w, {}, {}, 0, model == Model::Scalar};
  for (const auto& idx : w.modes) walker.inv.push_back(1.0 / (mode_to_point(w.lattice, idx) + k));
  std::vector<std::ptrdiff_t> starts;
  if (model == Model::Scalar) {
    walker.stages = {hops(pots.v)};
    walker.steps = p;
    for (std::size_t i = 0; i < w.size(); ++i) starts.push_back(static_cast<std::ptrdiff_t>(i));
  } else {
    walker.stages = {hops(pots.u_ref), hops(pots.u)};
    walker.steps = 2 * p;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (in_lambda_star_coset(w.modes[i])) starts.push_back(static_cast<std::ptrdiff_t>(i));
    }
  }
  if (walker.stages.front().empty()) return {};
  std::vector<cplx> per_start(starts.size());
  parallel_for(starts.size(), [&](std::size_t s) {
    Neumaier acc;
    walker.walk(starts[s], starts[s], 0, 1.0, acc);
    per_start[s] = acc.value();
  });
  Neumaier total;
  for (const cplx z : per_start) total += z;
  return total.value();
}

// Σ_{γ ∈ lattice, |γ+k| > R} (|γ+k| − reach)^{−power}: explicit out to 4R,
// then the area-density integral with a unit-cell margin.
double outer_sum(const LatticeSpec& lattice, cplx k, double radius, double reach, int power) {
  if (radius - reach <= 0.0) return std::numeric_limits<double>::infinity();
  const double outer = 4.0 * radius;
  double s = 0.0;
  for (const auto& idx : truncated_modes(lattice, outer, k)) {
    const double d = std::abs(mode_to_point(lattice, idx) + k);
    if (d > radius) s += std::pow(d - reach, -power);
  }
  // ∫_{outer−h}^∞ (2πr/A)(r − reach − h)^{−power} dr with h one cell diameter.
  const double h = 2.0 * lattice.shortest();
  const double a = outer - reach - 2.0 * h;
  const double c = reach + h;
  const double n = power;
  const double integral = 2.0 * std::numbers::pi / lattice.cell_area() *
                          (std::pow(a, 2.0 - n) / (n - 2.0) + c * std::pow(a, 1.0 - n) / (n - 1.0));
  return s + integral;
}

double tail_bound(Model model, const Potentials& pots, cplx k, int p, double radius) {
  if (model == Model::Scalar) {
    const LatticeSpec l = LatticeSpec::lambda_star();
    const double step = l.shortest();
    return p * std::pow(6.0, p - 1) * std::pow(pots.v.max_abs(), p) *
           outer_sum(l, k, radius, 0.5 * p * step, 2 * p);
  }
  const LatticeSpec l = LatticeSpec::gamma_star();
  const double step = std::abs(mode_to_point(l, k_point_index));
  return 2.0 * p * std::pow(3.0, 2 * p - 1) * std::pow(pots.u.max_abs(), 2 * p) *
         outer_sum(l, k, radius, p * step, 2 * p);
}

}  // namespace

std::string to_string(TraceMethod method) {
  return method == TraceMethod::LatticeSum ? "LatticeSum" : "EigenSum";
}

TraceResult trace_power_lattice(Model model, const Potentials& pots, cplx k, int p, double radius) {
  if (p < 2) throw InputError("trace power must be at least 2");
  TraceResult r;
  r.model = model;
  r.p = p;
  r.k = k;
  r.radius = radius;
  r.method = TraceMethod::LatticeSum;
  r.value = loop_sum(model, pots, k, p, radius);
  const bool zero = model == Model::Scalar ? pots.v.empty() : pots.u.empty();
  r.tail_bound = zero ? 0.0 : tail_bound(model, pots, k, p, radius);
  return r;
}

cplx trace_first_power_lattice(Model model, const Potentials& pots, cplx k, double radius) {
  return loop_sum(model, pots, k, 1, radius);
}

TraceResult trace_power_eig(Model model, const Potentials& pots, cplx k, int p, double radius) {
  if (p < 1) throw InputError("trace power must be positive");
  TraceResult r;
  r.model = model;
  r.p = p;
  r.k = k;
  r.radius = radius;
  r.method = TraceMethod::EigenSum;
  Neumaier acc;
  for (const cplx l : eigenvalues(assemble_T(model, pots, k, radius).entries).eigenvalues) {
    acc += std::pow(l, p);
  }
  r.value = acc.value();
  return r;
}

std::optional<RationalProbe> rational_probe(double x, double unit, std::int64_t max_den) {
  if (max_den < 1) throw InputError("max_den must be at least 1");
  if (!(unit != 0.0) || !std::isfinite(x)) return std::nullopt;
  const double y = x / unit;
  // Convergents h/k of the continued fraction of y.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double rest = y;
  RationalProbe best{0, 1, std::abs(y)};
  for (int iter = 0; iter < 64; ++iter) {
    const double a_real = std::floor(rest);
    if (std::abs(a_real) > 1e15) break;
    const auto a = static_cast<std::int64_t>(a_real);
    const std::int64_t h2 = a * h1 + h0;
    const std::int64_t k2 = a * k1 + k0;
    if (k2 > max_den) {
      // Largest admissible semiconvergent.
      const std::int64_t t = (max_den - k0) / k1;
      if (t > 0) {
        const std::int64_t hs = t * h1 + h0;
        const std::int64_t ks = t * k1 + k0;
        const double res = std::abs(y - static_cast<double>(hs) / static_cast<double>(ks));
        if (res < best.residual) best = {hs, ks, res};
      }
      break;
    }
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    const double res = std::abs(y - static_cast<double>(h1) / static_cast<double>(k1));
    if (res < best.residual) best = {h1, k1, res};
    const double frac = rest - a_real;
    if (frac < 1e-15) break;
    rest = 1.0 / frac;
  }
  if (best.residual < 1e-6) return best;
  return std::nullopt;
}

SumRuleReport sum_rule_check(Model model, const Potentials& pots, cplx k, double radius,
                             const std::vector<MagicCandidate>& cands, double max_abs_alpha) {
  SumRuleReport r;
  r.max_abs_alpha = max_abs_alpha;
  r.trace = trace_power_lattice(model, pots, k, 2, radius).value;
  const cplx eig_total = trace_power_eig(model, pots, k, 2, radius).value;
  Neumaier acc;
  for (const auto& c : cands) {
    if (c.converged && std::abs(c.alpha) <= max_abs_alpha) {
      acc += static_cast<double>(c.multiplicity) * c.lambda * c.lambda;
    }
  }
  r.converged_sum = acc.value();
  r.unconverged_mass = eig_total - r.converged_sum;
  r.gap = std::abs(r.trace - r.converged_sum);
  r.relative_gap = std::abs(r.trace) > 0.0 ? r.gap / std::abs(r.trace) : r.gap;
  return r;
}

}  // namespace flatbands
