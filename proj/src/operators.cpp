#include "flatbands/operators.hpp"

#include <cmath>

#include "flatbands/errors.hpp"

namespace flatbands {

std::string to_string(Model model) { return model == Model::Scalar ? "scalar" : "chiral"; }

Model parse_model(const std::string& text) {
  if (text == "scalar") return Model::Scalar;
  if (text == "chiral") return Model::Chiral;
  throw InputError("unknown model '" + text + "' (expected scalar or chiral)");
}

std::string to_string(OperatorLabel label) {
  switch (label) {
    case OperatorLabel::ScalarQ: return "ScalarQ";
    case OperatorLabel::ScalarQdZeta: return "ScalarQdZeta";
    case OperatorLabel::ChiralD: return "ChiralD";
    case OperatorLabel::ProductP: return "ProductP";
    case OperatorLabel::TScalar: return "TScalar";
    case OperatorLabel::TChiral: return "TChiral";
  }
  return "?";
}

std::ptrdiff_t BasisWindow::find(ModeIndex idx) const {
  const auto it = lookup_.find(idx);
  return it == lookup_.end() ? -1 : it->second;
}

void BasisWindow::index() {
  lookup_.clear();
  lookup_.reserve(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) lookup_[modes[i]] = static_cast<std::ptrdiff_t>(i);
}

BasisWindow make_window(LatticeSpec lattice, double radius, cplx shift) {
  BasisWindow w;
  w.lattice = lattice;
  w.shift = shift;
  w.radius = radius;
  w.modes = truncated_modes(lattice, radius, shift);
  if (w.modes.empty()) throw InputError("truncation window is empty; increase the radius");
  w.index();
  return w;
}

BasisWindow make_chiral_sector_window(double radius, cplx shift) {
  BasisWindow w;
  w.lattice = LatticeSpec::gamma_star();
  w.shift = shift;
  w.radius = radius;
  w.sector = "chiral-sector";
  const ModeIndex minus_k = -k_point_index;
  for (const auto& idx : truncated_modes(w.lattice, radius, shift)) {
    const ModeIndex d = idx - minus_k;
    if (in_lambda_star_coset(idx) || in_lambda_star_coset(d)) w.modes.push_back(idx);
  }
  if (w.modes.empty()) throw InputError("truncation window is empty; increase the radius");
  w.index();
  return w;
}

namespace {

std::vector<cplx> shifted_points(const BasisWindow& w, cplx k) {
  std::vector<cplx> out;
  out.reserve(w.size());
  for (const auto& idx : w.modes) out.push_back(mode_to_point(w.lattice, idx) + k);
  return out;
}

TrigPolynomial on_lattice(const TrigPolynomial& f, const LatticeSpec& lattice) {
  if (f.lattice() == lattice) return f;
  if (lattice.kind() == LatticeKind::GammaStar) return to_gamma_star(f);
  return to_lambda_star(f);
}

// Adds scale·f̂(γ − γ') into the (row_block, col_block) block of `m`.
void add_multiplication(Matrix& m, const TrigPolynomial& f_in, const BasisWindow& w,
                        Eigen::Index row_block, Eigen::Index col_block, cplx scale) {
  const TrigPolynomial f = on_lattice(f_in, w.lattice);
  const auto n = static_cast<Eigen::Index>(w.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const ModeIndex col = w.modes[static_cast<std::size_t>(j)];
    for (const auto& [q, c] : f.coefficients()) {
      const auto i = w.find(col + q);
      if (i >= 0) m(row_block * n + i, col_block * n + j) += scale * c;
    }
  }
}

OperatorMatrix make_operator(OperatorLabel label, const BasisWindow& w, int components) {
  OperatorMatrix op;
  op.label = label;
  op.window = w;
  op.basis = w.modes;
  op.components = components;
  const auto n = static_cast<Eigen::Index>(w.size()) * components;
  op.entries = Matrix::Zero(n, n);
  return op;
}

}  // namespace

Matrix multiplication_matrix(const TrigPolynomial& f, const BasisWindow& window) {
  const auto n = static_cast<Eigen::Index>(window.size());
  Matrix m = Matrix::Zero(n, n);
  add_multiplication(m, f, window, 0, 0, 1.0);
  return m;
}

OperatorMatrix assemble_scalar_Q(const Potentials& pots, cplx alpha, cplx k, const BasisWindow& w) {
  auto op = make_operator(OperatorLabel::ScalarQ, w, 1);
  const auto pts = shifted_points(w, k);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    op.entries(ii, ii) = pts[i] * pts[i];
  }
  if (alpha != cplx{}) add_multiplication(op.entries, pots.v, w, 0, 0, -alpha * alpha);
  return op;
}

OperatorMatrix assemble_scalar_Q_dzeta(cplx k, const BasisWindow& w) {
  auto op = make_operator(OperatorLabel::ScalarQdZeta, w, 1);
  const auto pts = shifted_points(w, k);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    op.entries(ii, ii) = 2.0 * pts[i];
  }
  return op;
}

OperatorMatrix assemble_chiral_D(const Potentials& pots, cplx alpha, cplx k, const BasisWindow& w) {
  auto op = make_operator(OperatorLabel::ChiralD, w, 2);
  const auto pts = shifted_points(w, k);
  const auto n = static_cast<Eigen::Index>(w.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    op.entries(i, i) = pts[static_cast<std::size_t>(i)];
    op.entries(n + i, n + i) = pts[static_cast<std::size_t>(i)];
  }
  if (alpha != cplx{}) {
    add_multiplication(op.entries, pots.u, w, 0, 1, alpha);
    add_multiplication(op.entries, pots.u_ref, w, 1, 0, alpha);
  }
  return op;
}

OperatorMatrix assemble_P(const Potentials& pots, cplx alpha, cplx k, const BasisWindow& w) {
  // (D(−α)+k)(D(α)+k): diagonal blocks (2D_zbar+k)² − α²V, upper-right
  // α[2D_zbar, U] = αV₁(z), lower-left α[2D_zbar, U(−z)] = −αV₁(−z).
  auto op = make_operator(OperatorLabel::ProductP, w, 2);
  const auto pts = shifted_points(w, k);
  const auto n = static_cast<Eigen::Index>(w.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx d = pts[static_cast<std::size_t>(i)] * pts[static_cast<std::size_t>(i)];
    op.entries(i, i) = d;
    op.entries(n + i, n + i) = d;
  }
  if (alpha != cplx{}) {
    add_multiplication(op.entries, pots.v_gamma, w, 0, 0, -alpha * alpha);
    add_multiplication(op.entries, pots.v_gamma, w, 1, 1, -alpha * alpha);
    add_multiplication(op.entries, pots.v1, w, 0, 1, alpha);
    add_multiplication(op.entries, pots.v1_ref, w, 1, 0, alpha);
  }
  return op;
}

void require_regular_shift(cplx k, const BasisWindow& w, double rel) {
  const double eps = rel * w.lattice.shortest();
  for (const auto& idx : w.modes) {
    if (std::abs(mode_to_point(w.lattice, idx) + k) < eps) {
      throw SingularShift("shift k = (" + std::to_string(k.real()) + ", " +
                          std::to_string(k.imag()) + ") lies on the dual lattice " +
                          std::string(to_string(w.lattice.kind())));
    }
  }
}

OperatorMatrix assemble_T_scalar(const Potentials& pots, cplx k, const BasisWindow& w,
                                 double shift_rel) {
  require_regular_shift(k, w, shift_rel);
  auto op = make_operator(OperatorLabel::TScalar, w, 1);
  add_multiplication(op.entries, pots.v, w, 0, 0, 1.0);
  const auto pts = shifted_points(w, k);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    op.entries.row(static_cast<Eigen::Index>(i)) /= pts[i] * pts[i];
  }
  return op;
}

OperatorMatrix assemble_T_chiral(const Potentials& pots, cplx k, const BasisWindow& w,
                                 double shift_rel) {
  if (w.lattice.kind() != LatticeKind::GammaStar) {
    throw InputError("chiral operators need a Gamma* window");
  }
  require_regular_shift(k, w, shift_rel);
  const auto pts = shifted_points(w, k);

  OperatorMatrix op;
  op.label = OperatorLabel::TChiral;
  op.window = w;
  op.components = 1;
  std::vector<std::ptrdiff_t> outer;  // window positions forming the basis
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.sector.empty() || in_lambda_star_coset(w.modes[i])) {
      outer.push_back(static_cast<std::ptrdiff_t>(i));
      op.basis.push_back(w.modes[i]);
    }
  }
  std::vector<std::ptrdiff_t> outer_pos(w.size(), -1);
  for (std::size_t r = 0; r < outer.size(); ++r) outer_pos[static_cast<std::size_t>(outer[r])] = static_cast<std::ptrdiff_t>(r);

  const auto n = static_cast<Eigen::Index>(outer.size());
  op.entries = Matrix::Zero(n, n);
  // Column γ': U(−z) moves it to γ'' = γ' + q', then U(z) to γ = γ'' + q.
  for (Eigen::Index j = 0; j < n; ++j) {
    const ModeIndex col = w.modes[static_cast<std::size_t>(outer[static_cast<std::size_t>(j)])];
    for (const auto& [q_ref, c_ref] : pots.u_ref.coefficients()) {
      const auto mid = w.find(col + q_ref);
      if (mid < 0) continue;
      const cplx weight = c_ref / pts[static_cast<std::size_t>(mid)];
      const ModeIndex mid_mode = w.modes[static_cast<std::size_t>(mid)];
      for (const auto& [q, c] : pots.u.coefficients()) {
        const auto row = w.find(mid_mode + q);
        if (row < 0) continue;
        const auto r = outer_pos[static_cast<std::size_t>(row)];
        if (r < 0) continue;
        op.entries(r, j) += c * weight / pts[static_cast<std::size_t>(row)];
      }
    }
  }
  return op;
}

OperatorMatrix assemble_T(Model model, const Potentials& pots, cplx k, double radius) {
  if (model == Model::Scalar) {
    return assemble_T_scalar(pots, k, make_window(LatticeSpec::lambda_star(), radius, k));
  }
  return assemble_T_chiral(pots, k, make_chiral_sector_window(radius, k));
}

double operator_scale(Model model, const Potentials& pots, cplx alpha) {
  if (model == Model::Scalar) return std::norm(alpha) * pots.v.max_abs() + dual_unit * dual_unit;
  return std::abs(alpha) * pots.u.max_abs() + dual_unit;
}

}  // namespace flatbands
