#include "flatbands/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "flatbands/errors.hpp"

namespace flatbands {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// NaN/inf have no JSON representation; they become null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

void put_complex(Json& j, const std::string& name, cplx z) {
  j[name + "_re"] = number(z.real());
  j[name + "_im"] = number(z.imag());
}

Json to_json(const MagicCandidate& c) {
  Json j;
  put_complex(j, "alpha", c.alpha);
  put_complex(j, "lambda", c.lambda);
  j["model"] = to_string(c.model);
  j["multiplicity"] = c.multiplicity;
  j["residual"] = number(c.residual);
  j["cross_k_delta"] = number(c.cross_k_delta);
  j["ladder_delta"] = number(c.ladder_delta);
  j["radius"] = c.radius;
  j["converged"] = c.converged;
  j["unreliable"] = c.unreliable;
  return j;
}

Json to_json(const Spacing& s) { return Json{{"alpha", s.alpha}, {"delta", s.delta}}; }

Json to_json(const MultiplicityResult& r) {
  Json j;
  if (r.infinite) {
    j["m"] = "Infinite";
  } else {
    j["m"] = r.m;
  }
  put_complex(j, "raw", r.raw);
  put_complex(j, "k", r.center);
  j["contour_radius"] = r.radius;
  j["n_quad"] = r.n_quad;
  j["window"] = r.window;
  return j;
}

Json to_json(const ProfileEntry& e) {
  Json j;
  put_complex(j, "k", e.k);
  j["ok"] = e.ok;
  if (e.ok) {
    j["result"] = to_json(e.result);
  } else {
    j["error"] = e.error;
  }
  return j;
}

Json to_json(const TraceResult& r) {
  Json j;
  j["model"] = to_string(r.model);
  j["p"] = r.p;
  put_complex(j, "k", r.k);
  put_complex(j, "value", r.value);
  j["tail_bound"] = number(r.tail_bound);
  j["method"] = to_string(r.method);
  j["radius"] = r.radius;
  return j;
}

Json to_json(const RationalProbe& r) {
  return Json{{"num", r.num}, {"den", r.den}, {"residual", r.residual}};
}

Json to_json(const SumRuleReport& r) {
  Json j;
  put_complex(j, "trace", r.trace);
  put_complex(j, "converged_sum", r.converged_sum);
  put_complex(j, "unconverged_mass", r.unconverged_mass);
  j["gap"] = number(r.gap);
  j["relative_gap"] = number(r.relative_gap);
  j["max_abs_alpha"] = r.max_abs_alpha;
  return j;
}

Json to_json(const FlatBandCheck& r) {
  Json j;
  j["is_flat"] = r.is_flat;
  j["max_sigma_min"] = r.max_sigma_min;
  put_complex(j, "argmax_k", r.argmax_k);
  j["scale"] = r.scale;
  j["tol"] = r.tol;
  return j;
}

Json to_json(const OneKReport& r) {
  return Json{{"sigma_k0", r.sigma_k0},     {"max_sigma_grid", r.max_sigma_grid},
              {"below_k0", r.below_k0},     {"below_grid", r.below_grid},
              {"consistent", r.consistent}, {"scale", r.scale}};
}

Json to_json(const BandSweep& s) {
  Json j;
  j["model"] = to_string(s.model);
  put_complex(j, "alpha", s.alpha);
  j["kset"] = s.kset.kind == KSetKind::Grid ? "grid" : "path";
  j["resolution"] = s.kset.resolution;
  Json way = Json::array();
  for (const cplx w : s.kset.waypoints) {
    Json p;
    put_complex(p, "k", w);
    way.push_back(p);
  }
  j["waypoints"] = way;
  j["scale"] = s.scale;
  double lo = 0.0, hi = 0.0;
  if (!s.energies.empty()) {
    lo = hi = s.energies.front().front();
    for (const auto& e : s.energies) {
      lo = std::min(lo, e.front());
      hi = std::max(hi, e.front());
    }
  }
  j["lowest_band_min"] = lo;
  j["lowest_band_max"] = hi;
  Json rows = Json::array();
  for (std::size_t i = 0; i < s.kset.points.size(); ++i) {
    Json r;
    put_complex(r, "k", s.kset.points[i]);
    r["energies"] = s.energies[i];
    rows.push_back(r);
  }
  j["points"] = rows;
  return j;
}

Json describe_window(Model model, double radius) {
  Json j;
  j["lattice"] = std::string(to_string(model_lattice(model).kind()));
  j["radius"] = radius;
  j["radius_units"] = radius / dual_unit;
  j["sector"] = model == Model::Chiral ? "chiral-sector" : "full";
  return j;
}

Json make_document(const std::string& kind, const Json& config, std::uint64_t fingerprint,
                   const Json& window) {
  Json j;
  j["schema"] = schema_version;
  j["kind"] = kind;
  j["version"] = library_version;
  j["status"] = "ok";
  j["config"] = config;
  j["potential_fingerprint"] = hex64(fingerprint);
  j["window"] = window;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace flatbands
