#include "swiptnoma/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace swiptnoma::conic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);

}  // namespace

// ---------------------------------------------------------------------------
// LinExpr

LinExpr LinExpr::var(int index, double coeff) {
  LinExpr e;
  if (index < 0) throw std::invalid_argument("negative variable index");
  e.terms_.emplace_back(index, coeff);
  return e;
}

LinExpr& LinExpr::operator+=(const LinExpr& rhs) {
  constant_ += rhs.constant_;
  terms_.insert(terms_.end(), rhs.terms_.begin(), rhs.terms_.end());
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& rhs) {
  constant_ -= rhs.constant_;
  for (const auto& [i, c] : rhs.terms_) terms_.emplace_back(i, -c);
  return *this;
}

LinExpr& LinExpr::operator*=(double s) {
  constant_ *= s;
  for (auto& [i, c] : terms_) c *= s;
  return *this;
}

Eigen::RowVectorXd LinExpr::row(int n) const {
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
  for (const auto& [i, c] : terms_) {
    if (i >= n) throw std::invalid_argument("expression references unknown variable");
    r(i) += c;
  }
  return r;
}

double LinExpr::eval(const Eigen::VectorXd& x) const {
  double v = constant_;
  for (const auto& [i, c] : terms_) v += c * x(i);
  return v;
}

// ---------------------------------------------------------------------------
// svec / smat / realification

int svec_dim(int side) { return side * (side + 1) / 2; }

Eigen::VectorXd svec(const Eigen::MatrixXd& S) {
  const int n = static_cast<int>(S.rows());
  Eigen::VectorXd v(svec_dim(n));
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i)
      v(k++) = (i == j) ? S(i, j) : kSqrt2 * 0.5 * (S(i, j) + S(j, i));
  return v;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v) {
  const int d = static_cast<int>(v.size());
  const int n = static_cast<int>((std::sqrt(8.0 * d + 1.0) - 1.0) / 2.0 + 0.5);
  if (svec_dim(n) != d) throw std::invalid_argument("svec length is not triangular");
  Eigen::MatrixXd S(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) {
      S(i, j) = (i == j) ? v(k) : v(k) / kSqrt2;
      S(j, i) = S(i, j);
      ++k;
    }
  return S;
}

Eigen::MatrixXd realify_hermitian_block(const Eigen::MatrixXcd& H, double tol) {
  const int n = static_cast<int>(H.rows());
  if (H.cols() != n) throw std::invalid_argument("realify needs a square matrix");
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if (((H - H.adjoint()).cwiseAbs().maxCoeff()) > tol * scale)
    throw std::invalid_argument("matrix is not Hermitian within tolerance");
  Eigen::MatrixXd X(2 * n, 2 * n);
  const Eigen::MatrixXd re = H.real(), im = H.imag();
  X.topLeftCorner(n, n) = re;
  X.topRightCorner(n, n) = -im;
  X.bottomLeftCorner(n, n) = im;
  X.bottomRightCorner(n, n) = re;
  return X;
}

Eigen::MatrixXcd recover_hermitian(const Eigen::MatrixXd& X) {
  const int m = static_cast<int>(X.rows());
  if (X.cols() != m || m % 2 != 0)
    throw std::invalid_argument("expected an even-sided square matrix");
  const int n = m / 2;
  Eigen::MatrixXd re = 0.5 * (X.topLeftCorner(n, n) + X.bottomRightCorner(n, n));
  Eigen::MatrixXd im = 0.5 * (X.bottomLeftCorner(n, n) - X.topRightCorner(n, n));
  Eigen::MatrixXcd H = re.cast<std::complex<double>>() +
                       std::complex<double>(0, 1) * im.cast<std::complex<double>>();
  return 0.5 * (H + H.adjoint());
}

// ---------------------------------------------------------------------------
// Problem building

const char* to_string(ConicStatus s) {
  switch (s) {
    case ConicStatus::Optimal: return "Optimal";
    case ConicStatus::Infeasible: return "Infeasible";
    case ConicStatus::Unbounded: return "Unbounded";
    case ConicStatus::NumericalTrouble: return "NumericalTrouble";
  }
  return "?";
}

double KktResiduals::max() const { return std::max({primal_res, dual_res, gap}); }

int ConicProblem::add_variable(std::string name) {
  if (name.empty()) name = "x" + std::to_string(names_.size());
  names_.push_back(std::move(name));
  return static_cast<int>(names_.size()) - 1;
}

int ConicProblem::add_psd_variable_block(int side, const std::string& name) {
  if (side < 1 || side > 16) throw std::invalid_argument("PSD side must be in [1,16]");
  const int offset = static_cast<int>(names_.size());
  for (int j = 0; j < side; ++j)
    for (int i = j; i < side; ++i)
      add_variable(name + "[" + std::to_string(i) + "," + std::to_string(j) + "]");
  std::vector<std::vector<LinExpr>> entries(side, std::vector<LinExpr>(side));
  for (int j = 0; j < side; ++j)
    for (int i = j; i < side; ++i) entries[i][j] = psd_entry(offset, side, i, j);
  add_psd(entries);
  return offset;
}

void ConicProblem::set_objective(LinExpr objective) { objective_ = std::move(objective); }

void ConicProblem::add_equality(LinExpr lhs, LinExpr rhs) {
  equalities_.push_back(lhs - rhs);
}

void ConicProblem::add_nonneg(LinExpr expr) {
  cones_.push_back({{ConeKind::NonNeg, 1}, {std::move(expr)}});
}

void ConicProblem::add_second_order(std::vector<LinExpr> rows) {
  if (rows.size() < 2) throw std::invalid_argument("second-order cone needs dim >= 2");
  cones_.push_back({{ConeKind::SecondOrder, static_cast<int>(rows.size())}, std::move(rows)});
}

void ConicProblem::add_rotated_second_order(std::vector<LinExpr> rows) {
  if (rows.size() < 3) throw std::invalid_argument("rotated cone needs dim >= 3");
  cones_.push_back(
      {{ConeKind::RotatedSecondOrder, static_cast<int>(rows.size())}, std::move(rows)});
}

void ConicProblem::add_schur_2x2(LinExpr a, LinExpr b, LinExpr v) {
  add_rotated_second_order({std::move(a), std::move(b), kSqrt2 * std::move(v)});
}

void ConicProblem::add_psd(const std::vector<std::vector<LinExpr>>& entries) {
  const int side = static_cast<int>(entries.size());
  if (side < 1 || side > 16) throw std::invalid_argument("PSD side must be in [1,16]");
  std::vector<LinExpr> rows;
  rows.reserve(svec_dim(side));
  for (int j = 0; j < side; ++j) {
    if (static_cast<int>(entries[j].size()) < j + 1)
      throw std::invalid_argument("PSD entries must cover the lower triangle");
    for (int i = j; i < side; ++i)
      rows.push_back(i == j ? entries[i][j] : kSqrt2 * entries[i][j]);
  }
  cones_.push_back({{ConeKind::Psd, side}, std::move(rows)});
}

LinExpr ConicProblem::trace_expr(const Eigen::MatrixXd& coeff, int offset) const {
  const int side = static_cast<int>(coeff.rows());
  LinExpr e;
  for (int j = 0; j < side; ++j) {
    e += psd_entry(offset, side, j, j) * coeff(j, j);
    for (int i = j + 1; i < side; ++i) {
      const double c = coeff(i, j) + coeff(j, i);
      if (c != 0.0) e += psd_entry(offset, side, i, j) * c;
    }
  }
  return e;
}

LinExpr ConicProblem::psd_entry(int offset, int side, int i, int j) const {
  if (i < j) std::swap(i, j);
  const int col_start = j * side - j * (j - 1) / 2;
  return LinExpr::var(offset + col_start + (i - j));
}

Eigen::VectorXd ConicProblem::extract_psd_block(const Eigen::VectorXd& x, int offset,
                                                int side) const {
  return x.segment(offset, svec_dim(side));
}

Eigen::MatrixXd ConicProblem::psd_block_value(const Eigen::VectorXd& x, int offset,
                                              int side) const {
  Eigen::MatrixXd S(side, side);
  int k = offset;
  for (int j = 0; j < side; ++j)
    for (int i = j; i < side; ++i) {
      S(i, j) = x(k++);
      S(j, i) = S(i, j);
    }
  return S;
}

namespace {

void print_expr(std::ostream& os, const LinExpr& e,
                const std::vector<std::string>& names) {
  bool first = true;
  Eigen::RowVectorXd r = e.row(static_cast<int>(names.size()));
  for (int i = 0; i < r.size(); ++i) {
    if (r(i) == 0.0) continue;
    if (!first) os << (r(i) >= 0 ? " + " : " - ");
    else if (r(i) < 0) os << "-";
    const double a = std::abs(r(i));
    if (a != 1.0) os << a << "*";
    os << names[i];
    first = false;
  }
  if (first) os << e.constant();
  else if (e.constant() != 0.0)
    os << (e.constant() > 0 ? " + " : " - ") << std::abs(e.constant());
}

const char* kind_name(ConeKind k) {
  switch (k) {
    case ConeKind::NonNeg: return "NonNeg";
    case ConeKind::SecondOrder: return "SecondOrder";
    case ConeKind::RotatedSecondOrder: return "RotatedSecondOrder";
    case ConeKind::Psd: return "Psd";
  }
  return "?";
}

}  // namespace

void ConicProblem::dump(std::ostream& os) const {
  os << "conic problem: " << names_.size() << " variables, " << equalities_.size()
     << " equalities, " << cones_.size() << " cone constraints\n";
  os << "maximize ";
  print_expr(os, objective_, names_);
  os << "\n";
  for (size_t i = 0; i < equalities_.size(); ++i) {
    os << "eq[" << i << "]: ";
    print_expr(os, equalities_[i], names_);
    os << " == 0\n";
  }
  for (size_t i = 0; i < cones_.size(); ++i) {
    const auto& c = cones_[i];
    os << "cone[" << i << "] " << kind_name(c.spec.kind) << "(" << c.spec.dim << "):\n";
    for (const auto& row : c.rows) {
      os << "  ";
      print_expr(os, row, names_);
      os << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// Solver internals

namespace {

enum class LoweredKind { NonNeg, Soc, Psd };

struct LoweredCone {
  LoweredKind kind;
  int offset = 0;  // row offset into G/h
  int dim = 0;     // number of rows
  int side = 0;    // Psd only
};

struct Lowered {
  int n = 0, p = 0, m = 0;
  Eigen::VectorXd c;  // minimize form
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  std::vector<LoweredCone> cones;
  double nu = 0.0;  // barrier degree

  // mapping back to user-level constraints
  std::vector<int> user_cone_offset;  // row offset per user cone (lowered coords)
  std::vector<int> user_cone_dim;
  std::vector<ConeKind> user_cone_kind;
  double obj_constant = 0.0;
  double cscale = 1.0;
  Eigen::VectorXd eq_scale;    // per equality row divisor applied
  Eigen::VectorXd cone_scale;  // per user cone divisor applied
  Eigen::VectorXd col_scale;   // variable reparameterization x = D x~
  // unscaled data (after rotated-cone lowering) for residual reporting
  Eigen::MatrixXd A0, G0;
  Eigen::VectorXd b0, h0, c0;
};

// Orthogonal involution mapping rotated-SOC coordinates to plain SOC.
void rsoc_to_soc_inplace(Eigen::Ref<Eigen::VectorXd> v) {
  const double a = v(0), b = v(1);
  v(0) = (a + b) / kSqrt2;
  v(1) = (a - b) / kSqrt2;
}

Lowered lower(const ConicProblem& prob) {
  Lowered L;
  L.n = prob.variable_count();
  if (L.n < 1) throw std::invalid_argument("problem has no variables");
  if (prob.cones().empty()) throw std::invalid_argument("problem has no cone constraints");

  L.p = static_cast<int>(prob.equalities().size());
  L.A.resize(L.p, L.n);
  L.b.resize(L.p);
  for (int i = 0; i < L.p; ++i) {
    L.A.row(i) = prob.equalities()[i].row(L.n);
    L.b(i) = -prob.equalities()[i].constant();
  }

  int m = 0;
  for (const auto& c : prob.cones()) m += static_cast<int>(c.rows.size());
  L.m = m;
  L.G.resize(m, L.n);
  L.h.resize(m);

  int off = 0;
  for (const auto& c : prob.cones()) {
    const int dim = static_cast<int>(c.rows.size());
    L.user_cone_offset.push_back(off);
    L.user_cone_dim.push_back(dim);
    L.user_cone_kind.push_back(c.spec.kind);
    for (int r = 0; r < dim; ++r) {
      // rows encode F x + f in K as G x + s = h with G = -F, h = f
      L.G.row(off + r) = -c.rows[r].row(L.n);
      L.h(off + r) = c.rows[r].constant();
    }
    LoweredCone lc;
    lc.offset = off;
    lc.dim = dim;
    switch (c.spec.kind) {
      case ConeKind::NonNeg:
        lc.kind = LoweredKind::NonNeg;
        L.nu += dim;
        break;
      case ConeKind::SecondOrder:
        lc.kind = LoweredKind::Soc;
        L.nu += 1;
        break;
      case ConeKind::RotatedSecondOrder: {
        lc.kind = LoweredKind::Soc;
        L.nu += 1;
        // rotate (a, b, u) into ((a+b)/s2, (a-b)/s2, u)
        Eigen::RowVectorXd g0 = L.G.row(off), g1 = L.G.row(off + 1);
        L.G.row(off) = (g0 + g1) / kSqrt2;
        L.G.row(off + 1) = (g0 - g1) / kSqrt2;
        Eigen::VectorXd hh = L.h.segment(off, 2);
        L.h(off) = (hh(0) + hh(1)) / kSqrt2;
        L.h(off + 1) = (hh(0) - hh(1)) / kSqrt2;
        break;
      }
      case ConeKind::Psd: {
        lc.kind = LoweredKind::Psd;
        lc.side = c.spec.dim;
        if (svec_dim(lc.side) != dim)
          throw std::invalid_argument("PSD row count does not match side");
        L.nu += lc.side;
        break;
      }
    }
    L.cones.push_back(lc);
    off += dim;
  }

  // maximize f -> minimize -f
  Eigen::RowVectorXd f = prob.objective().row(L.n);
  L.c = -f.transpose();
  L.obj_constant = prob.objective().constant();

  L.A0 = L.A;
  L.G0 = L.G;
  L.b0 = L.b;
  L.h0 = L.h;
  L.c0 = L.c;

  // Equilibration. Columns first (a plain change of variables, so cone
  // geometry is untouched), then per-equality-row and per-cone-block
  // scalars, then the objective.
  L.col_scale.resize(L.n);
  for (int j = 0; j < L.n; ++j) {
    double sj = L.G.col(j).cwiseAbs().maxCoeff();
    if (L.p) sj = std::max(sj, L.A.col(j).cwiseAbs().maxCoeff());
    L.col_scale(j) = (sj > 1e-12) ? 1.0 / std::sqrt(sj) : 1.0;
    L.G.col(j) *= L.col_scale(j);
    if (L.p) L.A.col(j) *= L.col_scale(j);
    L.c(j) *= L.col_scale(j);
  }
  L.eq_scale.resize(L.p);
  for (int i = 0; i < L.p; ++i) {
    double s = std::max(L.A.row(i).cwiseAbs().maxCoeff(), std::abs(L.b(i)));
    L.eq_scale(i) = (s > 1e-12) ? s : 1.0;
    L.A.row(i) /= L.eq_scale(i);
    L.b(i) /= L.eq_scale(i);
  }
  L.cone_scale.resize(static_cast<int>(L.user_cone_offset.size()));
  for (size_t k = 0; k < L.user_cone_offset.size(); ++k) {
    const int o = L.user_cone_offset[k], d = L.user_cone_dim[k];
    double s = L.h.segment(o, d).cwiseAbs().maxCoeff();
    if (L.n > 0) s = std::max(s, L.G.block(o, 0, d, L.n).cwiseAbs().maxCoeff());
    L.cone_scale(static_cast<int>(k)) = (s > 1e-12) ? s : 1.0;
    L.G.middleRows(o, d) /= L.cone_scale(static_cast<int>(k));
    L.h.segment(o, d) /= L.cone_scale(static_cast<int>(k));
  }
  const double cn = L.c.cwiseAbs().maxCoeff();
  L.cscale = (cn > 1e-12) ? cn : 1.0;
  L.c /= L.cscale;
  return L;
}

// --- cone vector utilities (block-wise) ---

void cone_identity(const Lowered& L, Eigen::VectorXd& e) {
  e = Eigen::VectorXd::Zero(L.m);
  for (const auto& c : L.cones) {
    switch (c.kind) {
      case LoweredKind::NonNeg:
        e.segment(c.offset, c.dim).setOnes();
        break;
      case LoweredKind::Soc:
        e(c.offset) = 1.0;
        break;
      case LoweredKind::Psd:
        e.segment(c.offset, c.dim) = svec(Eigen::MatrixXd::Identity(c.side, c.side));
        break;
    }
  }
}

// Largest deficit of cone-interiority; negative means strictly inside.
double interior_deficit(const LoweredCone& c, const Eigen::VectorXd& v) {
  switch (c.kind) {
    case LoweredKind::NonNeg:
      return -v.segment(c.offset, c.dim).minCoeff();
    case LoweredKind::Soc:
      return v.segment(c.offset + 1, c.dim - 1).norm() - v(c.offset);
    case LoweredKind::Psd: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(smat(v.segment(c.offset, c.dim)),
                                                        Eigen::EigenvaluesOnly);
      return -es.eigenvalues().minCoeff();
    }
  }
  return kInf;
}

double max_deficit(const Lowered& L, const Eigen::VectorXd& v) {
  double d = -kInf;
  for (const auto& c : L.cones) d = std::max(d, interior_deficit(c, v));
  return d;
}

// Nesterov-Todd scaling for one block.
struct BlockScaling {
  Eigen::VectorXd w_nn;          // NonNeg
  Eigen::MatrixXd W, Winv;       // Soc / Psd (svec coordinates)
  Eigen::VectorXd lambda;        // scaled point
};

struct Scalings {
  std::vector<BlockScaling> blocks;
};

Eigen::MatrixXd psd_scaling_matrix(const Eigen::MatrixXd& R, int side) {
  // matrix of u -> svec(R^T smat(u) R)
  const int d = svec_dim(side);
  Eigen::MatrixXd W(d, d);
  Eigen::VectorXd ek = Eigen::VectorXd::Zero(d);
  for (int k = 0; k < d; ++k) {
    ek(k) = 1.0;
    W.col(k) = svec(R.transpose() * smat(ek) * R);
    ek(k) = 0.0;
  }
  return W;
}

bool compute_scaling(const Lowered& L, const Eigen::VectorXd& s, const Eigen::VectorXd& z,
                     Scalings& sc) {
  sc.blocks.resize(L.cones.size());
  for (size_t k = 0; k < L.cones.size(); ++k) {
    const auto& c = L.cones[k];
    auto& B = sc.blocks[k];
    switch (c.kind) {
      case LoweredKind::NonNeg: {
        auto sv = s.segment(c.offset, c.dim), zv = z.segment(c.offset, c.dim);
        if (sv.minCoeff() <= 0 || zv.minCoeff() <= 0) return false;
        B.w_nn = (sv.array() / zv.array()).sqrt();
        B.lambda = (sv.array() * zv.array()).sqrt();
        break;
      }
      case LoweredKind::Soc: {
        Eigen::VectorXd sv = s.segment(c.offset, c.dim), zv = z.segment(c.offset, c.dim);
        const double sres2 = sv(0) * sv(0) - sv.tail(c.dim - 1).squaredNorm();
        const double zres2 = zv(0) * zv(0) - zv.tail(c.dim - 1).squaredNorm();
        if (sres2 <= 0 || zres2 <= 0 || sv(0) <= 0 || zv(0) <= 0) return false;
        const double a = std::sqrt(sres2), b = std::sqrt(zres2);
        Eigen::VectorXd st = sv / a, zt = zv / b;
        const double gamma = std::sqrt((1.0 + st.dot(zt)) / 2.0);
        Eigen::VectorXd wbar = zt;
        wbar(0) = st(0) + zt(0);
        wbar.tail(c.dim - 1) = st.tail(c.dim - 1) - zt.tail(c.dim - 1);
        wbar /= 2.0 * gamma;
        // cone square root of wbar (unit hyperbolic determinant)
        Eigen::VectorXd u = wbar;
        const double u0 = std::sqrt((wbar(0) + 1.0) / 2.0);
        u(0) = u0;
        u.tail(c.dim - 1) = wbar.tail(c.dim - 1) / (2.0 * u0);
        const double eta = std::sqrt(a / b);
        Eigen::MatrixXd J = -Eigen::MatrixXd::Identity(c.dim, c.dim);
        J(0, 0) = 1.0;
        B.W = eta * (2.0 * u * u.transpose() - J);
        Eigen::VectorXd ju = u;
        ju.tail(c.dim - 1) *= -1.0;
        B.Winv = (1.0 / eta) * (2.0 * ju * ju.transpose() - J);
        B.lambda = B.W * zv;
        break;
      }
      case LoweredKind::Psd: {
        Eigen::MatrixXd S = smat(s.segment(c.offset, c.dim));
        Eigen::MatrixXd Z = smat(z.segment(c.offset, c.dim));
        Eigen::LLT<Eigen::MatrixXd> lls(S), llz(Z);
        if (lls.info() != Eigen::Success || llz.info() != Eigen::Success) return false;
        Eigen::MatrixXd Ls = lls.matrixL(), Lz = llz.matrixL();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lz.transpose() * Ls,
                                              Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::VectorXd sig = svd.singularValues();
        if (sig.minCoeff() <= 0) return false;
        Eigen::VectorXd isq = sig.array().sqrt().inverse();
        Eigen::MatrixXd R = Ls * svd.matrixV() * isq.asDiagonal();
        Eigen::MatrixXd Rinv = isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
        B.W = psd_scaling_matrix(R, c.side);
        B.Winv = psd_scaling_matrix(Rinv, c.side);
        B.lambda = B.W * z.segment(c.offset, c.dim);
        break;
      }
    }
  }
  return true;
}

void apply_W(const Lowered& L, const Scalings& sc, const Eigen::VectorXd& v,
             Eigen::VectorXd& out) {
  out.resize(L.m);
  for (size_t k = 0; k < L.cones.size(); ++k) {
    const auto& c = L.cones[k];
    const auto& B = sc.blocks[k];
    if (c.kind == LoweredKind::NonNeg)
      out.segment(c.offset, c.dim) =
          B.w_nn.array() * v.segment(c.offset, c.dim).array();
    else
      out.segment(c.offset, c.dim) = B.W * v.segment(c.offset, c.dim);
  }
}

void apply_WinvT(const Lowered& L, const Scalings& sc, const Eigen::VectorXd& v,
                 Eigen::VectorXd& out) {
  out.resize(L.m);
  for (size_t k = 0; k < L.cones.size(); ++k) {
    const auto& c = L.cones[k];
    const auto& B = sc.blocks[k];
    if (c.kind == LoweredKind::NonNeg)
      out.segment(c.offset, c.dim) =
          v.segment(c.offset, c.dim).array() / B.w_nn.array();
    else
      out.segment(c.offset, c.dim) = B.Winv.transpose() * v.segment(c.offset, c.dim);
  }
}

void apply_WT(const Lowered& L, const Scalings& sc, const Eigen::VectorXd& v,
              Eigen::VectorXd& out) {
  out.resize(L.m);
  for (size_t k = 0; k < L.cones.size(); ++k) {
    const auto& c = L.cones[k];
    const auto& B = sc.blocks[k];
    if (c.kind == LoweredKind::NonNeg)
      out.segment(c.offset, c.dim) =
          B.w_nn.array() * v.segment(c.offset, c.dim).array();
    else
      out.segment(c.offset, c.dim) = B.W.transpose() * v.segment(c.offset, c.dim);
  }
}

// Jordan product u o v blockwise.
void jordan_product(const Lowered& L, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                    Eigen::VectorXd& out) {
  out.resize(L.m);
  for (const auto& c : L.cones) {
    switch (c.kind) {
      case LoweredKind::NonNeg:
        out.segment(c.offset, c.dim) =
            u.segment(c.offset, c.dim).array() * v.segment(c.offset, c.dim).array();
        break;
      case LoweredKind::Soc: {
        auto uu = u.segment(c.offset, c.dim);
        auto vv = v.segment(c.offset, c.dim);
        out(c.offset) = uu.dot(vv);
        out.segment(c.offset + 1, c.dim - 1) =
            uu(0) * vv.tail(c.dim - 1) + vv(0) * uu.tail(c.dim - 1);
        break;
      }
      case LoweredKind::Psd: {
        Eigen::MatrixXd U = smat(u.segment(c.offset, c.dim));
        Eigen::MatrixXd V = smat(v.segment(c.offset, c.dim));
        out.segment(c.offset, c.dim) = svec(0.5 * (U * V + V * U));
        break;
      }
    }
  }
}

// Solve lambda o x = d blockwise.
bool jordan_solve(const Lowered& L, const Eigen::VectorXd& lambda,
                  const Eigen::VectorXd& d, Eigen::VectorXd& x) {
  x.resize(L.m);
  for (const auto& c : L.cones) {
    switch (c.kind) {
      case LoweredKind::NonNeg: {
        auto lv = lambda.segment(c.offset, c.dim);
        if (lv.minCoeff() <= 0) return false;
        x.segment(c.offset, c.dim) =
            d.segment(c.offset, c.dim).array() / lv.array();
        break;
      }
      case LoweredKind::Soc: {
        auto lv = lambda.segment(c.offset, c.dim);
        auto dv = d.segment(c.offset, c.dim);
        const double det = lv(0) * lv(0) - lv.tail(c.dim - 1).squaredNorm();
        if (det <= 0 || lv(0) <= 0) return false;
        const double x0 = (lv(0) * dv(0) - lv.tail(c.dim - 1).dot(dv.tail(c.dim - 1))) / det;
        x(c.offset) = x0;
        x.segment(c.offset + 1, c.dim - 1) =
            (dv.tail(c.dim - 1) - x0 * lv.tail(c.dim - 1)) / lv(0);
        break;
      }
      case LoweredKind::Psd: {
        Eigen::MatrixXd Lm = smat(lambda.segment(c.offset, c.dim));
        Eigen::MatrixXd D = smat(d.segment(c.offset, c.dim));
        // lambda is diagonal in exact arithmetic but treat generally:
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Lm);
        if (es.info() != Eigen::Success) return false;
        Eigen::VectorXd ev = es.eigenvalues();
        if (ev.minCoeff() <= 0) return false;
        Eigen::MatrixXd Q = es.eigenvectors();
        Eigen::MatrixXd Dt = Q.transpose() * D * Q;
        for (int i = 0; i < c.side; ++i)
          for (int j = 0; j < c.side; ++j) Dt(i, j) = 2.0 * Dt(i, j) / (ev(i) + ev(j));
        x.segment(c.offset, c.dim) = svec(Q * Dt * Q.transpose());
        break;
      }
    }
  }
  return true;
}

// Largest t with v + t dv staying in the cone (v strictly interior), capped at cap.
double max_step(const Lowered& L, const Eigen::VectorXd& v, const Eigen::VectorXd& dv,
                double cap) {
  double alpha = cap;
  for (const auto& c : L.cones) {
    switch (c.kind) {
      case LoweredKind::NonNeg: {
        for (int i = 0; i < c.dim; ++i) {
          const double d = dv(c.offset + i);
          if (d < 0) alpha = std::min(alpha, -v(c.offset + i) / d);
        }
        break;
      }
      case LoweredKind::Soc: {
        auto vv = v.segment(c.offset, c.dim);
        auto dd = dv.segment(c.offset, c.dim);
        const double a = dd(0) * dd(0) - dd.tail(c.dim - 1).squaredNorm();
        const double b = 2.0 * (vv(0) * dd(0) - vv.tail(c.dim - 1).dot(dd.tail(c.dim - 1)));
        const double cc = vv(0) * vv(0) - vv.tail(c.dim - 1).squaredNorm();
        double bound = kInf;
        if (std::abs(a) < 1e-300) {
          if (b < 0) bound = -cc / b;
        } else {
          const double disc = b * b - 4.0 * a * cc;
          if (disc >= 0) {
            const double sq = std::sqrt(disc);
            const double r1 = (-b - sq) / (2.0 * a), r2 = (-b + sq) / (2.0 * a);
            double lo = std::min(r1, r2), hi = std::max(r1, r2);
            if (lo > 0) bound = lo;
            else if (hi > 0 && a < 0) bound = hi;
          }
        }
        if (dd(0) < 0) bound = std::min(bound, -vv(0) / dd(0));
        alpha = std::min(alpha, bound);
        break;
      }
      case LoweredKind::Psd: {
        Eigen::MatrixXd V = smat(v.segment(c.offset, c.dim));
        Eigen::MatrixXd D = smat(dv.segment(c.offset, c.dim));
        Eigen::LLT<Eigen::MatrixXd> llt(V);
        if (llt.info() != Eigen::Success) return 0.0;
        Eigen::MatrixXd Li = llt.matrixL().solve(Eigen::MatrixXd::Identity(c.side, c.side));
        Eigen::MatrixXd M = Li * D * Li.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()),
                                                          Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
        break;
      }
    }
  }
  return alpha;
}

struct KktSolver {
  Eigen::MatrixXd K;     // symmetric quasidefinite saddle matrix (unregularized)
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  int n, p, m;

  void factor(const Lowered& L, const Scalings& sc) {
    n = L.n;
    p = L.p;
    m = L.m;
    const int N = n + p + m;
    K.setZero(N, N);
    K.block(0, n, n, p) = L.A.transpose();
    K.block(n, 0, p, n) = L.A;
    K.block(0, n + p, n, m) = L.G.transpose();
    K.block(n + p, 0, m, n) = L.G;
    for (size_t k = 0; k < L.cones.size(); ++k) {
      const auto& c = L.cones[k];
      const auto& B = sc.blocks[k];
      auto blk = K.block(n + p + c.offset, n + p + c.offset, c.dim, c.dim);
      if (c.kind == LoweredKind::NonNeg)
        blk.diagonal() = -(B.w_nn.array() * B.w_nn.array());
      else
        blk = -(B.W.transpose() * B.W);
    }
    // tiny per-row regularization keeps every scale intact; solves are
    // refined against the true matrix below
    Eigen::MatrixXd Kreg = K;
    for (int i = 0; i < N; ++i) {
      const double delta = 1e-13 * (1.0 + std::abs(K(i, i)));
      Kreg(i, i) += (i < n) ? delta : -delta;
    }
    lu.compute(Kreg);
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = lu.solve(rhs);
    const double rhs_norm = rhs.cwiseAbs().maxCoeff() + 1e-300;
    for (int it = 0; it < 4; ++it) {
      Eigen::VectorXd r = rhs - K * x;
      if (r.cwiseAbs().maxCoeff() <= 1e-15 * rhs_norm) break;
      x += lu.solve(r);
    }
    return x;
  }
};

struct Residuals {
  double pres, dres, gap, comp;
  double pobj, dobj;
};

}  // namespace

ConicSolution solve(const ConicProblem& prob, const SolverOptions& opt) {
  Lowered L = lower(prob);
  const int n = L.n, p = L.p, m = L.m;

  ConicSolution sol;
  sol.x = Eigen::VectorXd::Zero(n);
  sol.eq_duals = Eigen::VectorXd::Zero(p);

  const Eigen::MatrixXd& A0 = L.A0;
  const Eigen::MatrixXd& G0 = L.G0;
  const Eigen::VectorXd& b0 = L.b0;
  const Eigen::VectorXd& h0 = L.h0;
  const Eigen::VectorXd& c0 = L.c0;
  const double cnorm = 1.0 + c0.cwiseAbs().maxCoeff();

  Eigen::VectorXd e;
  cone_identity(L, e);

  // Initial point: least-norm primal/dual candidates shifted into the cone.
  Eigen::VectorXd x(n), y(p), s(m), z(m);
  {
    Scalings id;
    id.blocks.resize(L.cones.size());
    for (size_t k = 0; k < L.cones.size(); ++k) {
      const auto& c = L.cones[k];
      if (c.kind == LoweredKind::NonNeg)
        id.blocks[k].w_nn = Eigen::VectorXd::Ones(c.dim);
      else {
        id.blocks[k].W = Eigen::MatrixXd::Identity(c.dim, c.dim);
        id.blocks[k].Winv = id.blocks[k].W;
      }
    }
    KktSolver kkt;
    kkt.factor(L, id);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + p + m);
    rhs.segment(n, p) = L.b;
    rhs.tail(m) = L.h;
    Eigen::VectorXd sol1 = kkt.solve(rhs);
    x = sol1.head(n);
    s = -sol1.tail(m);
    const double ap = max_deficit(L, s);
    if (ap >= 0) s += (1.0 + ap) * e;

    rhs.setZero();
    rhs.head(n) = -L.c;
    Eigen::VectorXd sol2 = kkt.solve(rhs);
    y = sol2.segment(n, p);
    z = sol2.tail(m);
    const double ad = max_deficit(L, z);
    if (ad >= 0) z += (1.0 + ad) * e;
  }
  double tau = 1.0, kappa = 1.0;

  // Residuals of the deflated point against the original data, normalized
  // per constraint so blocks of very different magnitude are judged on their
  // own scale. Primal feasibility is measured as cone-membership deficit of
  // the affine expression value, which a test can recompute from (x, duals).
  auto compute_orig_residuals = [&](const Eigen::VectorXd& xs, const Eigen::VectorXd& ys,
                                    const Eigen::VectorXd& zs, double tauv) -> Residuals {
    Eigen::VectorXd xh = (L.col_scale.array() * xs.array()).matrix() / tauv;
    Eigen::VectorXd yh(p), zh(m);
    for (int i = 0; i < p; ++i) yh(i) = L.cscale * ys(i) / (L.eq_scale(i) * tauv);
    for (size_t k = 0; k < L.user_cone_offset.size(); ++k) {
      const int o = L.user_cone_offset[k], d = L.user_cone_dim[k];
      zh.segment(o, d) =
          (L.cscale / L.cone_scale(static_cast<int>(k))) * zs.segment(o, d) / tauv;
    }
    Eigen::VectorXd sh = h0 - G0 * xh;  // slack implied by x
    Residuals r;
    r.pobj = c0.dot(xh);
    r.dobj = -(p ? b0.dot(yh) : 0.0) - h0.dot(zh);
    r.pres = 0.0;
    for (int i = 0; i < p; ++i)
      r.pres = std::max(r.pres, std::abs(A0.row(i).dot(xh) - b0(i)) /
                                    std::max(1.0, L.eq_scale(i)));
    r.dres = 0.0;
    for (size_t k = 0; k < L.cones.size(); ++k) {
      const double sc_k = std::max(1.0, L.cone_scale(static_cast<int>(k)));
      r.pres = std::max(r.pres,
                        std::max(0.0, interior_deficit(L.cones[k], sh)) / sc_k);
      r.dres = std::max(r.dres, std::max(0.0, interior_deficit(L.cones[k], zh)));
    }
    Eigen::VectorXd dres_vec = c0 + G0.transpose() * zh;
    if (p) dres_vec += A0.transpose() * yh;
    r.dres = std::max(r.dres, dres_vec.cwiseAbs().maxCoeff() / cnorm);
    const double denom = std::max({1.0, std::abs(r.pobj), std::abs(r.dobj)});
    r.gap = std::abs(r.pobj - r.dobj) / denom;
    r.comp = std::abs(sh.dot(zh)) / denom;
    return r;
  };

  auto finalize = [&](ConicStatus st, const Residuals& r, int iters) {
    sol.status = st;
    sol.iterations = iters;
    sol.x = (L.col_scale.array() * x.array()).matrix() / tau;
    // sign convention: grad f + sum_i eq_duals_i grad eq_i + sum_k F_k^T z_k = 0
    sol.eq_duals.resize(p);
    for (int i = 0; i < p; ++i)
      sol.eq_duals(i) = -L.cscale * y(i) / (L.eq_scale(i) * tau);
    sol.cone_duals.clear();
    for (size_t k = 0; k < L.user_cone_offset.size(); ++k) {
      const int o = L.user_cone_offset[k], d = L.user_cone_dim[k];
      Eigen::VectorXd zk =
          (L.cscale / L.cone_scale(static_cast<int>(k))) * z.segment(o, d) / tau;
      if (L.user_cone_kind[k] == ConeKind::RotatedSecondOrder) rsoc_to_soc_inplace(zk);
      sol.cone_duals.push_back(std::move(zk));
    }
    sol.residuals = {r.pres, r.dres, std::max(r.gap, r.comp)};
    // objective in the user's maximize sense
    sol.objective = -r.pobj + L.obj_constant;
    sol.dual_objective = -r.dobj + L.obj_constant;
    if (st == ConicStatus::Unbounded) sol.objective = kInf;
    if (st == ConicStatus::Infeasible) sol.objective = -kInf;
  };

  Scalings sc;
  KktSolver kkt;
  Eigen::VectorXd lambda(m);
  double prev_mu = kInf;
  int stall = 0;
  // best iterate seen, by worst relative residual; degenerate endgames can
  // drift after their most accurate point
  double best_score = kInf;
  Eigen::VectorXd bx = x, by = y, bz = z, bs = s;
  double btau = tau, bkappa = kappa;

  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    // residuals of the self-dual embedding (scaled data)
    Eigen::VectorXd rx = L.G.transpose() * z + L.c * tau;
    if (p) rx += L.A.transpose() * y;
    Eigen::VectorXd ry = p ? Eigen::VectorXd(-L.A * x + L.b * tau) : Eigen::VectorXd(0);
    Eigen::VectorXd rz = -L.G * x + L.h * tau - s;
    const double rtau = -L.c.dot(x) - (p ? L.b.dot(y) : 0.0) - L.h.dot(z) - kappa;
    const double mu = (s.dot(z) + tau * kappa) / (L.nu + 1.0);

    Residuals res = compute_orig_residuals(x, y, z, tau);
    const double score = std::max({res.pres, res.dres, res.gap, res.comp});
    if (score < best_score) {
      best_score = score;
      bx = x;
      by = y;
      bz = z;
      bs = s;
      btau = tau;
      bkappa = kappa;
    }
    if (res.pres <= opt.tol && res.dres <= opt.tol &&
        std::max(res.gap, res.comp) <= opt.tol) {
      finalize(ConicStatus::Optimal, res, iter);
      return sol;
    }

    // infeasibility certificates, tested on the equilibrated data where all
    // norms are O(1) so the thresholds are dimensionless
    {
      const double xi = -((p ? L.b.dot(y) : 0.0) + L.h.dot(z));
      const double dual_mag = std::max(z.cwiseAbs().maxCoeff(),
                                       p ? y.cwiseAbs().maxCoeff() : 0.0);
      if (xi > 1e-10 * std::max(1.0, dual_mag)) {
        Eigen::VectorXd cert = L.G.transpose() * z;
        if (p) cert += L.A.transpose() * y;
        if (cert.cwiseAbs().maxCoeff() <= opt.tol * xi) {
          finalize(ConicStatus::Infeasible, res, iter);
          return sol;
        }
      }
      const double zeta = -L.c.dot(x);
      if (zeta > 1e-10 * std::max(1.0, x.cwiseAbs().maxCoeff())) {
        const double eqres = p ? (L.A * x).cwiseAbs().maxCoeff() : 0.0;
        const double conres = (L.G * x + s).cwiseAbs().maxCoeff();
        if (std::max(eqres, conres) <= opt.tol * zeta) {
          finalize(ConicStatus::Unbounded, res, iter);
          return sol;
        }
      }
    }

    if (iter == opt.max_iter) break;
    if (mu < prev_mu * 0.999) stall = 0;
    else if (++stall >= 8) break;
    prev_mu = std::min(prev_mu, mu);

    if (!compute_scaling(L, s, z, sc)) break;
    lambda.resize(m);
    for (size_t k = 0; k < L.cones.size(); ++k)
      lambda.segment(L.cones[k].offset, L.cones[k].dim) = sc.blocks[k].lambda;
    kkt.factor(L, sc);

    Eigen::VectorXd rhs1 = Eigen::VectorXd::Zero(n + p + m);
    rhs1.head(n) = -L.c;
    rhs1.segment(n, p) = L.b;
    rhs1.tail(m) = L.h;
    Eigen::VectorXd u1 = kkt.solve(rhs1);
    const double cbh_u1 = L.c.dot(u1.head(n)) + (p ? L.b.dot(u1.segment(n, p)) : 0.0) +
                          L.h.dot(u1.tail(m));
    const double dg = kappa / tau - cbh_u1;

    auto take_step = [&](const Eigen::VectorXd& dxv, const Eigen::VectorXd& dyv,
                         const Eigen::VectorXd& dzv, double dtauv,
                         const Eigen::VectorXd& dcomp, double dtaukappa,
                         Eigen::VectorXd& Dx, Eigen::VectorXd& Dy, Eigen::VectorXd& Dz,
                         Eigen::VectorXd& Ds, double& Dtau, double& Dkappa) -> bool {
      Eigen::VectorXd dsbar;
      if (!jordan_solve(L, lambda, dcomp, dsbar)) return false;
      Eigen::VectorXd Wt_dsbar;
      apply_WT(L, sc, dsbar, Wt_dsbar);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + p + m);
      rhs.head(n) = dxv;
      rhs.segment(n, p) = -dyv;
      rhs.tail(m) = -(dzv + Wt_dsbar);
      Eigen::VectorXd u2 = kkt.solve(rhs);
      const double cbh_u2 = L.c.dot(u2.head(n)) + (p ? L.b.dot(u2.segment(n, p)) : 0.0) +
                            L.h.dot(u2.tail(m));
      if (std::abs(dg) < 1e-14) return false;
      Dtau = (dtauv + dtaukappa / tau + cbh_u2) / dg;
      Dx = u2.head(n) + Dtau * u1.head(n);
      Dy = u2.segment(n, p) + Dtau * u1.segment(n, p);
      Dz = u2.tail(m) + Dtau * u1.tail(m);
      Eigen::VectorXd WDz;
      apply_W(L, sc, Dz, WDz);
      Eigen::VectorXd tmp;
      apply_WT(L, sc, dsbar - WDz, tmp);
      Ds = tmp;
      Dkappa = (dtaukappa - kappa * Dtau) / tau;
      return true;
    };

    // scaled-space step bound: lambda + t W^{-T}ds and lambda + t W dz stay interior
    auto step_bound = [&](const Eigen::VectorXd& Ds, const Eigen::VectorXd& Dz,
                          double Dtau, double Dkappa) -> double {
      Eigen::VectorXd rs, rzv;
      apply_WinvT(L, sc, Ds, rs);
      apply_W(L, sc, Dz, rzv);
      double a = max_step(L, lambda, rs, kInf);
      a = std::min(a, max_step(L, lambda, rzv, kInf));
      if (Dtau < 0) a = std::min(a, -tau / Dtau);
      if (Dkappa < 0) a = std::min(a, -kappa / Dkappa);
      return a;
    };

    // affine (predictor) direction
    Eigen::VectorXd ll;
    jordan_product(L, lambda, lambda, ll);
    Eigen::VectorXd Dx_a, Dy_a, Dz_a, Ds_a;
    double Dtau_a, Dkappa_a;
    if (!take_step(-rx, -ry, -rz, -rtau, -ll, -tau * kappa, Dx_a, Dy_a, Dz_a, Ds_a,
                   Dtau_a, Dkappa_a))
      break;
    double alpha_a = std::min(1.0, step_bound(Ds_a, Dz_a, Dtau_a, Dkappa_a));

    const double mu_aff =
        ((s + alpha_a * Ds_a).dot(z + alpha_a * Dz_a) +
         (tau + alpha_a * Dtau_a) * (kappa + alpha_a * Dkappa_a)) /
        (L.nu + 1.0);
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::clamp(sigma, 0.0, 0.999);
    // recenter when progress slows; degenerate faces choke pure predictor steps
    if (alpha_a < 0.2) sigma = std::max(sigma, 0.5);

    // combined (corrector) direction
    Eigen::VectorXd ws, wz, corr;
    apply_WinvT(L, sc, Ds_a, ws);
    apply_W(L, sc, Dz_a, wz);
    jordan_product(L, ws, wz, corr);
    Eigen::VectorXd dcomp = sigma * mu * e - ll - corr;
    const double dtk = sigma * mu - tau * kappa - Dtau_a * Dkappa_a;
    const double w = 1.0 - sigma;
    Eigen::VectorXd Dx, Dy, Dz, Ds;
    double Dtau, Dkappa;
    if (!take_step(-w * rx, -w * ry, -w * rz, -w * rtau, dcomp, dtk, Dx, Dy, Dz, Ds,
                   Dtau, Dkappa))
      break;
    double alpha = std::min(1.0, 0.99 * step_bound(Ds, Dz, Dtau, Dkappa));
    if (alpha < 1e-8) break;

    x += alpha * Dx;
    y += alpha * Dy;
    z += alpha * Dz;
    s += alpha * Ds;
    tau += alpha * Dtau;
    kappa += alpha * Dkappa;
    if (tau <= 1e-300 || !std::isfinite(mu)) break;
  }

  // fall back to the most accurate iterate seen
  x = bx;
  y = by;
  z = bz;
  s = bs;
  tau = btau;
  kappa = bkappa;
  Residuals res = compute_orig_residuals(x, y, z, tau);
  if (res.pres <= opt.tol && res.dres <= opt.tol &&
      std::max(res.gap, res.comp) <= opt.tol)
    finalize(ConicStatus::Optimal, res, opt.max_iter);
  else
    finalize(ConicStatus::NumericalTrouble, res, opt.max_iter);
  return sol;
}

}  // namespace swiptnoma::conic
