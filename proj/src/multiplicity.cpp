#include "flatbands/multiplicity.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "flatbands/errors.hpp"
#include "flatbands/parallel.hpp"

namespace flatbands {

namespace {

std::string describe(const BasisWindow& w) {
  std::ostringstream os;
  os << to_string(w.lattice.kind()) << " radius=" << w.radius << " shift=(" << w.shift.real()
     << "," << w.shift.imag() << ") modes=" << w.size();
  return os.str();
}

// Neumaier-compensated complex sum, in index order.
cplx compensated_sum(const std::vector<cplx>& terms) {
  double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0;
  auto add = [](double& s, double& c, double x) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  };
  for (const auto& z : terms) {
    add(sr, cr, z.real());
    add(si, ci, z.imag());
  }
  return {sr + cr, si + ci};
}

}  // namespace

HolomorphicFamily scalar_family(const Potentials& pots, cplx alpha, const BasisWindow& w) {
  HolomorphicFamily f;
  f.label = "scalar";
  f.scale = operator_scale(Model::Scalar, pots, alpha);
  f.window = describe(w);
  f.evaluate = [&pots, alpha, w](cplx zeta) {
    return std::pair{assemble_scalar_Q(pots, alpha, zeta, w).entries,
                     assemble_scalar_Q_dzeta(zeta, w).entries};
  };
  return f;
}

HolomorphicFamily chiral_family(const Potentials& pots, cplx alpha, const BasisWindow& w) {
  HolomorphicFamily f;
  f.label = "chiral";
  f.scale = operator_scale(Model::Chiral, pots, alpha);
  f.window = describe(w);
  f.evaluate = [&pots, alpha, w](cplx zeta) {
    Matrix d = assemble_chiral_D(pots, alpha, zeta, w).entries;
    Matrix id = Matrix::Identity(d.rows(), d.cols());
    return std::pair{std::move(d), std::move(id)};
  };
  return f;
}

HolomorphicFamily custom_family(std::string label, std::function<Matrix(cplx)> value,
                                std::function<Matrix(cplx)> derivative, double scale) {
  HolomorphicFamily f;
  f.label = std::move(label);
  f.scale = scale;
  f.window = "custom";
  f.evaluate = [value = std::move(value), derivative = std::move(derivative)](cplx zeta) {
    return std::pair{value(zeta), derivative(zeta)};
  };
  return f;
}

MultiplicityResult gohberg_sigal_m(const HolomorphicFamily& family, cplx k, double r,
                                   const MultiplicityOptions& opts) {
  if (!(r > 0.0)) throw InputError("contour radius must be positive");
  if (opts.n_quad < 4) throw InputError("n_quad must be at least 4");

  auto integrand = [&](double theta) {
    const cplx node = std::polar(1.0, theta);
    const cplx zeta = k + r * node;
    auto [q, dq] = family.evaluate(zeta);
    const double threshold = opts.contour_tol * family.scale;
    std::ostringstream where;
    where << "contour |zeta - (" << k.real() << "," << k.imag() << ")| = " << r;
    if (sigma_min_estimate(q) < threshold) {
      throw ContourThroughZero(where.str() + " passes through a zero (sigma_min below tolerance)");
    }
    try {
      return logderiv_trace(q, dq, opts.cond_threshold) * node;
    } catch (const NearSingular& e) {
      throw ContourThroughZero(where.str() + ": " + e.what());
    }
  };

  // Trapezoid rule; each doubling reuses the previous nodes.
  std::vector<cplx> terms(static_cast<std::size_t>(opts.n_quad));
  parallel_for(terms.size(), [&](std::size_t j) {
    terms[j] = integrand(2.0 * std::numbers::pi * static_cast<double>(j) / opts.n_quad);
  });
  int n = opts.n_quad;
  cplx value = r * compensated_sum(terms) / static_cast<double>(n);
  while (true) {
    const int n2 = 2 * n;
    if (n2 > opts.max_n_quad) {
      throw NonInteger("contour integral did not settle within " + std::to_string(opts.max_n_quad) +
                       " nodes; shrink r or enlarge the window");
    }
    std::vector<cplx> odd(static_cast<std::size_t>(n));
    parallel_for(odd.size(), [&](std::size_t j) {
      odd[j] = integrand(2.0 * std::numbers::pi * static_cast<double>(2 * j + 1) / n2);
    });
    terms.insert(terms.end(), odd.begin(), odd.end());
    n = n2;
    const cplx next = r * compensated_sum(terms) / static_cast<double>(n);
    const bool settled = std::abs(next - value) < opts.agree_tol;
    value = next;
    if (settled) break;
  }

  MultiplicityResult out;
  out.raw = value;
  out.center = k;
  out.radius = r;
  out.n_quad = n;
  out.window = family.window;
  const double rounded = std::round(value.real());
  if (std::abs(value - cplx{rounded, 0.0}) >= opts.integer_tol) {
    std::ostringstream os;
    os << "contour integral " << value.real() << (value.imag() < 0 ? "" : "+") << value.imag()
       << "i is not within " << opts.integer_tol << " of an integer";
    throw NonInteger(os.str());
  }
  out.m = static_cast<int>(rounded);
  return out;
}

double default_contour_radius(cplx k, const LatticeSpec& lattice) {
  const double cap = 0.25 * LatticeSpec::gamma_star().shortest();
  return std::min(0.25 * distance_to_other_point(k, lattice), cap);
}

MultiplicityResult multiplicity_with_dichotomy(Model model, const Potentials& pots, cplx alpha,
                                               cplx k, double window_radius,
                                               const MultiplicityOptions& opts) {
  const LatticeSpec lattice = model_lattice(model);
  const BasisWindow w = make_window(lattice, window_radius, k);
  const HolomorphicFamily family =
      model == Model::Scalar ? scalar_family(pots, alpha, w) : chiral_family(pots, alpha, w);

  double r = default_contour_radius(k, lattice);
  for (int attempt = 0;; ++attempt) {
    try {
      return gohberg_sigal_m(family, k, r, opts);
    } catch (const ContourThroughZero&) {
      if (attempt == 4) break;
      r *= 0.5;
    }
  }
  // Persistent zero on the contour: infinite multiplicity iff Q(α,k') is
  // singular at a generic k' as well.
  const cplx generic = 0.31 * lattice.b1() + 0.47 * lattice.b2() + k;
  const BasisWindow wg = make_window(lattice, window_radius, generic);
  const Matrix q = model == Model::Scalar ? assemble_scalar_Q(pots, alpha, generic, wg).entries
                                          : assemble_chiral_D(pots, alpha, generic, wg).entries;
  const double smin = smallest_singular_values(q, 1).front();
  if (smin < 1e-6 * family.scale) {
    MultiplicityResult out;
    out.infinite = true;
    out.center = k;
    out.radius = r;
    out.window = family.window;
    return out;
  }
  throw ContourThroughZero("contour keeps hitting a zero of Q but alpha is not flat at a generic k");
}

ProtectedReport protected_multiplicity_scalar(const Potentials& pots, cplx alpha,
                                              double window_radius,
                                              const MultiplicityOptions& opts) {
  ProtectedReport report;
  report.result = multiplicity_with_dichotomy(Model::Scalar, pots, alpha, 0.0, window_radius, opts);
  if (report.result.infinite) {
    report.at_least_two = true;
    report.two_mod_three = false;
  } else {
    report.at_least_two = report.result.m >= 2;
    report.two_mod_three = report.result.m % 3 == 2;
  }
  return report;
}

std::vector<ProfileEntry> multiplicity_profile(Model model, const Potentials& pots, cplx alpha,
                                               const std::vector<cplx>& ks, double window_radius,
                                               const MultiplicityOptions& opts) {
  const LatticeSpec lattice = model_lattice(model);
  const BasisWindow w = make_window(lattice, window_radius, 0.0);
  const HolomorphicFamily family =
      model == Model::Scalar ? scalar_family(pots, alpha, w) : chiral_family(pots, alpha, w);
  std::vector<ProfileEntry> out;
  out.reserve(ks.size());
  for (const cplx k : ks) {
    ProfileEntry e;
    e.k = k;
    try {
      e.result = gohberg_sigal_m(family, k, default_contour_radius(k, lattice), opts);
      e.ok = true;
    } catch (const Error& err) {
      e.error = err.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace flatbands
