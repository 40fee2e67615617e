#include "flatbands/potential.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "flatbands/errors.hpp"

namespace flatbands {

TrigPolynomial::TrigPolynomial(LatticeSpec lattice) : lattice_(lattice) {
  if (!lattice_.is_dual()) {
    throw InputError("trigonometric polynomials live on a dual lattice, got " +
                     std::string(to_string(lattice_.kind())));
  }
}

TrigPolynomial TrigPolynomial::constant(LatticeSpec lattice, cplx value) {
  TrigPolynomial f(lattice);
  f.set({0, 0}, value);
  return f;
}

cplx TrigPolynomial::coeff(ModeIndex idx) const {
  const auto it = coeffs_.find(idx);
  return it == coeffs_.end() ? cplx{} : it->second;
}

void TrigPolynomial::set(ModeIndex idx, cplx value) {
  if (value == cplx{}) {
    coeffs_.erase(idx);
  } else {
    coeffs_[idx] = value;
  }
}

double TrigPolynomial::max_abs() const {
  double out = 0.0;
  for (const auto& [idx, c] : coeffs_) out = std::max(out, std::abs(c));
  return out;
}

TrigPolynomial TrigPolynomial::scaled(cplx s) const {
  TrigPolynomial out(lattice_);
  for (const auto& [idx, c] : coeffs_) out.set(idx, s * c);
  return out;
}

TrigPolynomial TrigPolynomial::operator+(const TrigPolynomial& other) const {
  const TrigPolynomial a = lattice_ == other.lattice_ ? *this : to_gamma_star(*this);
  const TrigPolynomial b = lattice_ == other.lattice_ ? other : to_gamma_star(other);
  TrigPolynomial out = a;
  for (const auto& [idx, c] : b.coefficients()) out.add(idx, c);
  return out;
}

TrigPolynomial bm_potential_U() {
  const cplx amplitude{0.0, -4.0 * std::numbers::pi / 3.0};
  const cplx powers[3] = {1.0, omega, omega2};
  TrigPolynomial u(LatticeSpec::gamma_star());
  for (int l = 0; l < 3; ++l) u.set(rotate_mode(k_point_index, l), amplitude * powers[l]);
  return u;
}

TrigPolynomial to_gamma_star(const TrigPolynomial& f) {
  if (f.lattice().kind() == LatticeKind::GammaStar) return f;
  TrigPolynomial out(LatticeSpec::gamma_star());
  for (const auto& [idx, c] : f.coefficients()) out.set(lambda_star_to_gamma_star(idx), c);
  return out;
}

TrigPolynomial to_lambda_star(const TrigPolynomial& f) {
  if (f.lattice().kind() == LatticeKind::LambdaStar) return f;
  TrigPolynomial out(LatticeSpec::lambda_star());
  for (const auto& [idx, c] : f.coefficients()) {
    if (idx.m % 3 != 0 || idx.n % 3 != 0) {
      throw InputError("mode (" + std::to_string(idx.m) + "," + std::to_string(idx.n) +
                       ") of a Gamma* polynomial is not in Lambda*");
    }
    out.set({idx.m / 3, idx.n / 3}, c);
  }
  return out;
}

TrigPolynomial multiply(const TrigPolynomial& f, const TrigPolynomial& g) {
  const bool same = f.lattice() == g.lattice();
  const TrigPolynomial a = same ? f : to_gamma_star(f);
  const TrigPolynomial b = same ? g : to_gamma_star(g);

  struct Acc {
    cplx sum;
    double magnitude = 0.0;
  };
  std::map<ModeIndex, Acc, CanonicalLess> acc;
  for (const auto& [ia, ca] : a.coefficients()) {
    for (const auto& [ib, cb] : b.coefficients()) {
      auto& slot = acc[ia + ib];
      const cplx term = ca * cb;
      slot.sum += term;
      slot.magnitude += std::abs(term);
    }
  }
  constexpr double snap = 16.0 * std::numeric_limits<double>::epsilon();
  TrigPolynomial out(a.lattice());
  for (const auto& [idx, s] : acc) {
    if (std::abs(s.sum) > snap * s.magnitude) out.set(idx, s.sum);
  }
  return out;
}

TrigPolynomial reflect(const TrigPolynomial& f) {
  TrigPolynomial out(f.lattice());
  for (const auto& [idx, c] : f.coefficients()) out.set(-idx, c);
  return out;
}

TrigPolynomial rotate(const TrigPolynomial& f, int power) {
  // f(ω^j z) = Σ c_q e^{i⟨z, ω^{-j} q⟩}: the coefficient at p is c_{ω^j p}.
  TrigPolynomial out(f.lattice());
  for (const auto& [idx, c] : f.coefficients()) out.set(rotate_mode(idx, -power), c);
  return out;
}

TrigPolynomial apply_2Dzbar(const TrigPolynomial& f) {
  TrigPolynomial out(f.lattice());
  for (const auto& [idx, c] : f.coefficients()) out.set(idx, mode_to_point(f.lattice(), idx) * c);
  return out;
}

cplx evaluate(const TrigPolynomial& f, cplx z) {
  cplx sum;
  for (const auto& [idx, c] : f.coefficients()) {
    const double phase = pairing(z, mode_to_point(f.lattice(), idx));
    sum += c * cplx{std::cos(phase), std::sin(phase)};
  }
  return sum;
}

ModeIndex conj_mode(const LatticeSpec& spec, ModeIndex idx) {
  // Dual scales are imaginary: conj(s(mω+n)) = s(mω + (m−n)).
  // Direct scales are real: conj(mω+n) = −mω + (n−m).
  if (spec.is_dual()) return {idx.m, idx.m - idx.n};
  return {-idx.m, idx.n - idx.m};
}

SymmetryReport check_U_symmetries(const TrigPolynomial& u, double rel_tol) {
  const TrigPolynomial f = to_gamma_star(u);
  SymmetryReport report;
  const double scale = f.max_abs();
  const double allowed = rel_tol * scale;

  report.translation = true;
  for (const auto& [idx, c] : f.coefficients()) {
    const ModeIndex d = idx - k_point_index;
    if (d.m % 3 != 0 || d.n % 3 != 0) report.translation = false;
  }

  // rotate(U, 1) = ωU  ⇔  c_{ωp} = ω c_p for every p in the union of supports.
  double rot = 0.0;
  for (const auto& [idx, c] : f.coefficients()) {
    rot = std::max(rot, std::abs(f.coeff(rotate_mode(idx, 1)) - omega * c));
    rot = std::max(rot, std::abs(c - omega * f.coeff(rotate_mode(idx, -1))));
  }
  // conj(U(z̄)) = −U(−z)  ⇔  c_{s̄} = −conj(c_s).
  double cj = 0.0;
  for (const auto& [idx, c] : f.coefficients()) {
    cj = std::max(cj, std::abs(f.coeff(conj_mode(f.lattice(), idx)) + std::conj(c)));
  }
  report.rotation_defect = scale > 0.0 ? rot / scale : rot;
  report.conjugation_defect = scale > 0.0 ? cj / scale : cj;
  report.rotation = rot <= allowed;
  report.conjugation = cj <= allowed;
  return report;
}

Potentials make_potentials(const TrigPolynomial& u_in) {
  TrigPolynomial u = to_gamma_star(u_in);
  TrigPolynomial u_ref = reflect(u);
  TrigPolynomial v_gamma = multiply(u, u_ref);
  TrigPolynomial v = to_lambda_star(v_gamma);
  TrigPolynomial v1 = apply_2Dzbar(u);
  TrigPolynomial v1_ref = apply_2Dzbar(u_ref);
  return {std::move(u), std::move(u_ref), std::move(v), std::move(v_gamma), std::move(v1),
          std::move(v1_ref)};
}

TrigPolynomial parse_potential(std::istream& in, LatticeSpec lattice) {
  TrigPolynomial f(lattice);
  std::map<ModeIndex, int, CanonicalLess> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::int64_t m = 0;
    std::int64_t n = 0;
    double re = 0.0;
    double im = 0.0;
    if (!(fields >> m)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw InputError("potential line " + std::to_string(line_no) + ": expected `m n re im`");
    }
    std::string extra;
    if (!(fields >> n >> re >> im) || (fields >> extra)) {
      throw InputError("potential line " + std::to_string(line_no) + ": expected `m n re im`");
    }
    if (!std::isfinite(re) || !std::isfinite(im)) {
      throw InputError("potential line " + std::to_string(line_no) + ": non-finite coefficient");
    }
    const ModeIndex idx{m, n};
    if (auto [it, inserted] = seen.emplace(idx, line_no); !inserted) {
      throw InputError("potential line " + std::to_string(line_no) + ": duplicate mode (" +
                       std::to_string(m) + "," + std::to_string(n) + "), first on line " +
                       std::to_string(it->second));
    }
    f.set(idx, {re, im});
  }
  return f;
}

TrigPolynomial read_potential_file(const std::filesystem::path& path, LatticeSpec lattice) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open potential file " + path.string());
  return parse_potential(in, lattice);
}

std::uint64_t fingerprint(const TrigPolynomial& f) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  mix(std::string(to_string(f.lattice().kind())));
  char buf[128];
  for (const auto& [idx, c] : f.coefficients()) {
    std::snprintf(buf, sizeof buf, "|%lld %lld %.17g %.17g", static_cast<long long>(idx.m),
                  static_cast<long long>(idx.n), c.real(), c.imag());
    mix(buf);
  }
  return h;
}

}  // namespace flatbands
