// flatbands: command-line driver.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flatbands/acceptance.hpp"
#include "flatbands/bands.hpp"
#include "flatbands/errors.hpp"
#include "flatbands/magic.hpp"
#include "flatbands/multiplicity.hpp"
#include "flatbands/parallel.hpp"
#include "flatbands/report.hpp"
#include "flatbands/traces.hpp"

using namespace flatbands;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numeric = 3;

cplx parse_complex(const std::string& text) {
  std::string s = text;
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(s);
  double re = 0.0, im = 0.0;
  if (!(in >> re)) throw InputError("cannot parse complex number '" + text + "' (expected re,im)");
  if (!(in >> im)) im = 0.0;
  std::string rest;
  if (in >> rest) throw InputError("cannot parse complex number '" + text + "' (expected re,im)");
  return {re, im};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string s = text;
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(s);
  double x;
  while (in >> x) out.push_back(x);
  if (!in.eof()) throw InputError("cannot parse list '" + text + "'");
  return out;
}

struct Common {
  std::string model = "scalar";
  bool builtin_bm = false;
  std::string potential;
  std::string potential_lattice = "gamma-star";
  std::string out = ".";
  std::string format = "json";
  int threads = 0;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* app, Common& c, bool with_model = true) {
  if (with_model) {
    app->add_option("--model", c.model, "scalar or chiral")
        ->check(CLI::IsMember({"scalar", "chiral"}))
        ->capture_default_str();
  }
  app->add_flag("--builtin-bm", c.builtin_bm, "use the built-in BM potential U (default)");
  app->add_option("--potential", c.potential, "file of `m n re im` lines giving U");
  app->add_option("--potential-lattice", c.potential_lattice, "lattice of the file modes")
      ->check(CLI::IsMember({"gamma-star", "lambda-star"}))
      ->capture_default_str();
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_option("--format", c.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads (0 = all cores)")->capture_default_str();
  app->add_option("--seed", c.seed, "seed for randomized sweeps")->capture_default_str();
}

struct Loaded {
  Potentials pots;
  std::uint64_t fingerprint = 0;
};

Loaded load_potential(const Common& c) {
  if (c.builtin_bm && !c.potential.empty()) {
    throw InputError("--builtin-bm and --potential are mutually exclusive");
  }
  TrigPolynomial u = bm_potential_U();
  if (!c.potential.empty()) {
    const LatticeSpec lat =
        c.potential_lattice == "gamma-star" ? LatticeSpec::gamma_star() : LatticeSpec::lambda_star();
    u = to_gamma_star(read_potential_file(c.potential, lat));
  }
  return {make_potentials(u), fingerprint(u)};
}

Json common_echo(const Common& c) {
  Json j;
  j["model"] = c.model;
  j["potential"] = c.potential.empty() ? "builtin-bm" : c.potential;
  j["potential_lattice"] = c.potential_lattice;
  j["format"] = c.format;
  j["seed"] = c.seed;
  return j;
}

std::filesystem::path out_path(const Common& c, const std::string& name) {
  return std::filesystem::path(c.out) / name;
}

// ---- magic / spacing ----

struct MagicArgs {
  Common common;
  std::string radii = "8,12,16,20";
  std::string k = "0,1";
  std::string k2 = "1,0.5";
  std::string k_residual = "0.3,-0.7";
  double max_abs_alpha = 0.0;
  double cluster_tol = 1e-6;
  double cross_tol = 1e-6;
  double flat_tol = 1e-6;
};

void add_magic_options(CLI::App* app, MagicArgs& a, bool with_model) {
  add_common(app, a.common, with_model);
  app->add_option("--radii", a.radii, "ascending truncation radii in units of 4pi/sqrt3")
      ->capture_default_str();
  app->add_option("--k", a.k, "Bloch shift re,im")->capture_default_str();
  app->add_option("--k2", a.k2, "cross-validation shift re,im")->capture_default_str();
  app->add_option("--k-residual", a.k_residual, "shift for sigma_min residuals")->capture_default_str();
  app->add_option("--max-abs-alpha", a.max_abs_alpha, "reliability bound (default 8 scalar, 10 chiral)");
  app->add_option("--cluster-tol", a.cluster_tol)->capture_default_str();
  app->add_option("--cross-tol", a.cross_tol)->capture_default_str();
  app->add_option("--flat-tol", a.flat_tol)->capture_default_str();
}

MagicSearchConfig magic_config(const MagicArgs& a) {
  auto c = default_search_config(parse_model(a.common.model));
  c.radii.clear();
  for (const double r : parse_list(a.radii)) c.radii.push_back(r * dual_unit);
  c.k = parse_complex(a.k);
  c.k2 = parse_complex(a.k2);
  c.k_residual = parse_complex(a.k_residual);
  if (a.max_abs_alpha > 0.0) c.max_abs_alpha = a.max_abs_alpha;
  c.cluster_tol = a.cluster_tol;
  c.cross_tol = a.cross_tol;
  c.flat_tol = a.flat_tol;
  if (c.radii.size() < 2) throw InputError("--radii needs at least two values");
  return c;
}

Json magic_echo(const MagicArgs& a, const MagicSearchConfig& c) {
  Json j = common_echo(a.common);
  j["radii_units"] = parse_list(a.radii);
  put_complex(j, "k", c.k);
  put_complex(j, "k2", c.k2);
  put_complex(j, "k_residual", c.k_residual);
  j["max_abs_alpha"] = c.max_abs_alpha;
  j["cluster_tol"] = c.cluster_tol;
  j["cross_tol"] = c.cross_tol;
  j["flat_tol"] = c.flat_tol;
  return j;
}

std::string magics_csv(const std::vector<MagicCandidate>& cands) {
  std::ostringstream os;
  os << "alpha_re,alpha_im,lambda_re,lambda_im,multiplicity,residual,cross_k_delta,radius,converged,"
        "unreliable\n";
  char buf[512];
  for (const auto& c : cands) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d,%.6g,%.6g,%.17g,%d,%d\n",
                  c.alpha.real(), c.alpha.imag(), c.lambda.real(), c.lambda.imag(), c.multiplicity,
                  c.residual, c.cross_k_delta, c.radius, c.converged ? 1 : 0, c.unreliable ? 1 : 0);
    os << buf;
  }
  return os.str();
}

int cmd_magic(const MagicArgs& a, bool spacings_only) {
  const auto cfg = magic_config(a);
  const auto loaded = load_potential(a.common);
  const Json echo = magic_echo(a, cfg);
  const Json window = describe_window(cfg.model, cfg.radii.back());
  const auto result = find_magics(loaded.pots, cfg);

  Json sp = make_document("spacings", echo, loaded.fingerprint, window);
  Json rows = Json::array();
  for (const auto& s : result.spacings) rows.push_back(to_json(s));
  sp["spacings"] = rows;
  write_text(out_path(a.common, "spacings.json"), dump(sp));

  std::size_t converged = 0;
  for (const auto& c : result.candidates) converged += c.converged ? 1 : 0;
  if (!spacings_only) {
    Json doc = make_document("magics", echo, loaded.fingerprint, window);
    Json list = Json::array();
    for (const auto& c : result.candidates) list.push_back(to_json(c));
    doc["magics"] = list;
    write_text(out_path(a.common, "magics.json"), dump(doc));
    if (a.common.format == "csv") write_text(out_path(a.common, "magics.csv"), magics_csv(result.candidates));
  }
  std::cout << result.candidates.size() << " candidates, " << converged << " converged\n";
  for (const auto& s : result.spacings) {
    std::printf("  alpha %.8f  delta %.6f\n", s.alpha, s.delta);
  }
  return exit_ok;
}

// ---- bands ----

struct BandsArgs {
  Common common;
  std::string alpha = "0,0";
  std::string kset = "path";
  int grid_n = 12;
  int samples = 48;
  int n_bands = 4;
  double window_radius = 8.0;
  double tol = 1e-6;
};

int cmd_bands(const BandsArgs& a) {
  const Model model = parse_model(a.common.model);
  const cplx alpha = parse_complex(a.alpha);
  const auto loaded = load_potential(a.common);
  const LatticeSpec lat = model_lattice(model);
  const KSet ks = a.kset == "grid" ? make_grid(lat, a.grid_n) : default_band_path(lat, a.samples);
  const double radius = a.window_radius * dual_unit;
  const auto sweep = band_sweep(model, loaded.pots, alpha, ks, a.n_bands, radius);

  Json echo = common_echo(a.common);
  put_complex(echo, "alpha", alpha);
  echo["kset"] = a.kset;
  echo["grid_n"] = a.grid_n;
  echo["samples"] = a.samples;
  echo["n_bands"] = a.n_bands;
  echo["window_radius_units"] = a.window_radius;
  echo["tol"] = a.tol;
  Json doc = make_document("bands", echo, loaded.fingerprint, describe_window(model, radius));
  doc["sweep"] = to_json(sweep);
  double hi = 0.0;
  for (const auto& e : sweep.energies) hi = std::max(hi, e.front());
  doc["flat"] = hi < a.tol * sweep.scale;
  if (ks.kind == KSetKind::Grid) {
    doc["flat_band_check"] = to_json(flat_band_check(model, loaded.pots, alpha, ks, a.tol, radius));
  }
  write_text(out_path(a.common, "bands.json"), dump(doc));
  write_text(out_path(a.common, "bands.csv"), bands_csv(sweep));
  std::printf("lowest band: min %.6g max %.6g (flat threshold %.3g)\n",
              doc["sweep"]["lowest_band_min"].get<double>(), hi, a.tol * sweep.scale);
  return exit_ok;
}

// ---- mult ----

struct MultArgs {
  Common common;
  std::string alpha = "0,0";
  std::string k = "0,0";
  double window_radius = 0.0;
  double contour_radius = 0.0;
  int n_quad = 64;
};

int cmd_mult(const MultArgs& a) {
  const Model model = parse_model(a.common.model);
  const cplx alpha = parse_complex(a.alpha);
  const cplx k = parse_complex(a.k);
  const auto loaded = load_potential(a.common);
  const double units = a.window_radius > 0.0 ? a.window_radius : default_mult_radius_units(model);
  const double radius = units * dual_unit;
  MultiplicityOptions opts;
  opts.n_quad = a.n_quad;

  MultiplicityResult res;
  if (a.contour_radius > 0.0) {
    const BasisWindow w = make_window(model_lattice(model), radius, k);
    const auto fam = model == Model::Scalar ? scalar_family(loaded.pots, alpha, w)
                                            : chiral_family(loaded.pots, alpha, w);
    res = gohberg_sigal_m(fam, k, a.contour_radius, opts);
  } else {
    res = multiplicity_with_dichotomy(model, loaded.pots, alpha, k, radius, opts);
  }
  Json echo = common_echo(a.common);
  put_complex(echo, "alpha", alpha);
  put_complex(echo, "k", k);
  echo["window_radius_units"] = units;
  echo["contour_radius"] = a.contour_radius;
  echo["n_quad"] = a.n_quad;
  Json doc = make_document("multiplicity", echo, loaded.fingerprint, describe_window(model, radius));
  doc["result"] = to_json(res);
  write_text(out_path(a.common, "mult.json"), dump(doc));
  if (res.infinite) {
    std::cout << "m = Infinite (alpha is magic)\n";
  } else {
    std::printf("m = %d (raw %.6f%+.2ei)\n", res.m, res.raw.real(), res.raw.imag());
  }
  return exit_ok;
}

// ---- traces ----

struct TracesArgs {
  Common common;
  std::vector<int> p{2};
  std::string k = "0,1";
  std::string k2 = "1,0.5";
  double radius = 16.0;
  std::int64_t max_den = 1000;
};

int cmd_traces(const TracesArgs& a) {
  const Model model = parse_model(a.common.model);
  const cplx k = parse_complex(a.k);
  const cplx k2 = parse_complex(a.k2);
  const auto loaded = load_potential(a.common);
  const double radius = a.radius * dual_unit;
  for (const int p : a.p) {
    if (p < 2 || p > max_trace_power) {
      throw InputError("--p values must lie in 2.." + std::to_string(max_trace_power));
    }
  }
  Json echo = common_echo(a.common);
  echo["p"] = a.p;
  put_complex(echo, "k", k);
  put_complex(echo, "k2", k2);
  echo["radius_units"] = a.radius;
  echo["max_den"] = a.max_den;
  Json doc = make_document("traces", echo, loaded.fingerprint, describe_window(model, radius));
  Json rows = Json::array();
  bool partial = false;
  for (const int p : a.p) {
    Json row;
    row["p"] = p;
    try {
      const auto lat = trace_power_lattice(model, loaded.pots, k, p, radius);
      const auto eig = trace_power_eig(model, loaded.pots, k, p, radius);
      const auto lat2 = trace_power_lattice(model, loaded.pots, k2, p, radius);
      row["lattice"] = to_json(lat);
      row["eig"] = to_json(eig);
      row["lattice_k2"] = to_json(lat2);
      const double scale = std::max(std::abs(lat.value), 1e-300);
      row["lattice_eig_rel_diff"] = std::abs(lat.value - eig.value) / scale;
      row["k_difference"] = std::abs(lat.value - lat2.value);
      row["k_within_tail_bounds"] =
          std::abs(lat.value - lat2.value) <= lat.tail_bound + lat2.tail_bound;
      row["value_over_pi_sqrt3"] = lat.value.real() / pi_over_sqrt3;
      const auto probe = rational_probe(lat.value.real(), pi_over_sqrt3, a.max_den);
      row["rational_probe"] = probe ? to_json(*probe) : Json(nullptr);
      std::printf("p=%d  lattice %.12g%+.3gi  eig %.12g%+.3gi  tail %.2e  /(pi/sqrt3) %.8f\n", p,
                  lat.value.real(), lat.value.imag(), eig.value.real(), eig.value.imag(),
                  lat.tail_bound, lat.value.real() / pi_over_sqrt3);
    } catch (const SingularShift&) {
      throw;
    } catch (const Error& e) {
      partial = true;
      row["error"] = e.what();
    }
    rows.push_back(row);
  }
  doc["traces"] = rows;
  if (partial) doc["status"] = "partial";
  write_text(out_path(a.common, "traces.json"), dump(doc));
  return partial ? exit_numeric : exit_ok;
}

// ---- validate ----

int cmd_validate(bool quick, const std::vector<int>& only, const Common& c) {
  AcceptanceOptions opts;
  opts.quick = quick;
  opts.only = only;
  opts.log = &std::cout;
  const auto results = run_acceptance(opts);
  Json echo = common_echo(c);
  echo["quick"] = quick;
  Json doc = make_document("validate", echo, fingerprint(bm_potential_U()), Json(nullptr));
  Json rows = Json::array();
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.passed;
    rows.push_back(Json{{"id", r.id},
                        {"name", r.name},
                        {"passed", r.passed},
                        {"warning", r.warning},
                        {"detail", r.detail}});
  }
  doc["criteria"] = rows;
  if (!ok) doc["status"] = "failed";
  write_text(out_path(c, "validate.json"), dump(doc));
  std::cout << (ok ? "all criteria passed" : "some criteria FAILED") << "\n";
  return ok ? exit_ok : exit_numeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magic parameters, bands, multiplicities and traces for flat-band models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", library_version);

  MagicArgs magic_args, magic_sc_args, magic_ch_args, spacing_args;
  auto* magic = app.add_subcommand("magic", "magic parameters with convergence checks");
  add_magic_options(magic, magic_args, true);
  auto* magic_sc = app.add_subcommand("magic-sc", "magic --model scalar");
  add_magic_options(magic_sc, magic_sc_args, false);
  auto* magic_ch = app.add_subcommand("magic-ch", "magic --model chiral");
  add_magic_options(magic_ch, magic_ch_args, false);
  magic_ch_args.common.model = "chiral";
  auto* spacing = app.add_subcommand("spacing", "real magic spacings only");
  add_magic_options(spacing, spacing_args, true);

  BandsArgs bands_args;
  auto* bands = app.add_subcommand("bands", "band sweep via singular values of Q(alpha,k)");
  add_common(bands, bands_args.common);
  bands->add_option("--alpha", bands_args.alpha, "coupling re,im")->capture_default_str();
  bands->add_option("--kset", bands_args.kset, "path or grid")
      ->check(CLI::IsMember({"path", "grid"}))
      ->capture_default_str();
  bands->add_option("--grid-n", bands_args.grid_n)->capture_default_str();
  bands->add_option("--samples", bands_args.samples, "samples per path segment")->capture_default_str();
  bands->add_option("--n-bands", bands_args.n_bands)->capture_default_str();
  bands->add_option("--window-radius", bands_args.window_radius, "units of 4pi/sqrt3")
      ->capture_default_str();
  bands->add_option("--tol", bands_args.tol, "flatness tolerance relative to the scale")
      ->capture_default_str();

  MultArgs mult_args;
  auto* mult = app.add_subcommand("mult", "Gohberg-Sigal multiplicity m(alpha,k)");
  add_common(mult, mult_args.common);
  mult->add_option("--alpha", mult_args.alpha)->capture_default_str();
  mult->add_option("--k", mult_args.k)->capture_default_str();
  mult->add_option("--window-radius", mult_args.window_radius, "units of 4pi/sqrt3 (model default)");
  mult->add_option("--contour-radius", mult_args.contour_radius, "fixed contour radius (auto if 0)");
  mult->add_option("--n-quad", mult_args.n_quad)->capture_default_str();

  TracesArgs traces_args;
  auto* traces = app.add_subcommand("traces", "tr T_k^p by lattice sums and eigenvalues");
  add_common(traces, traces_args.common);
  traces->add_option("--p", traces_args.p, "powers (2..4)")->delimiter(',')->capture_default_str();
  traces->add_option("--k", traces_args.k)->capture_default_str();
  traces->add_option("--k2", traces_args.k2)->capture_default_str();
  traces->add_option("--radius", traces_args.radius, "units of 4pi/sqrt3")->capture_default_str();
  traces->add_option("--max-den", traces_args.max_den)->capture_default_str();

  bool quick = false;
  std::vector<int> only;
  Common validate_common;
  auto* validate = app.add_subcommand("validate", "run the acceptance suite");
  validate->add_flag("--quick", quick, "reduced radii");
  validate->add_option("--only", only, "criterion ids to run")->delimiter(',');
  validate->add_option("--out", validate_common.out)->capture_default_str();
  validate->add_option("--threads", validate_common.threads)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    auto threads = [](const Common& c) { set_worker_count(static_cast<std::size_t>(std::max(0, c.threads))); };
    if (*magic) return threads(magic_args.common), cmd_magic(magic_args, false);
    if (*magic_sc) return threads(magic_sc_args.common), cmd_magic(magic_sc_args, false);
    if (*magic_ch) return threads(magic_ch_args.common), cmd_magic(magic_ch_args, false);
    if (*spacing) return threads(spacing_args.common), cmd_magic(spacing_args, true);
    if (*bands) return threads(bands_args.common), cmd_bands(bands_args);
    if (*mult) return threads(mult_args.common), cmd_mult(mult_args);
    if (*traces) return threads(traces_args.common), cmd_traces(traces_args);
    if (*validate) return threads(validate_common), cmd_validate(quick, only, validate_common);
  } catch (const InputError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return exit_config;
  } catch (const SingularShift& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return exit_config;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numeric;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return exit_config;
  }
  return exit_config;
}
