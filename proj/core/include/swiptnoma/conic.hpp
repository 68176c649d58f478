#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace swiptnoma::conic {

// Small dense conic programs: linear objective, linear equalities, and
// affine maps into nonnegative / second-order / rotated second-order /
// PSD cones. Solved by a homogeneous self-dual primal-dual path-following
// method with Nesterov-Todd scaling, so primal/dual infeasibility comes
// out as a certificate instead of a numerical failure.

enum class ConeKind { NonNeg, SecondOrder, RotatedSecondOrder, Psd };

struct ConeSpec {
  ConeKind kind = ConeKind::NonNeg;
  int dim = 1;  // vector length; matrix side for Psd (side <= 16)
};

/// Affine scalar expression c . x + constant over problem variables.
class LinExpr {
 public:
  LinExpr() = default;
  /*implicit*/ LinExpr(double constant) : constant_(constant) {}
  static LinExpr var(int index, double coeff = 1.0);

  LinExpr& operator+=(const LinExpr& rhs);
  LinExpr& operator-=(const LinExpr& rhs);
  LinExpr& operator*=(double s);

  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }
  friend LinExpr operator*(LinExpr a, double s) { return a *= s; }
  friend LinExpr operator-(LinExpr a) { return a *= -1.0; }

  double constant() const { return constant_; }
  const std::vector<std::pair<int, double>>& terms() const { return terms_; }
  /// Dense coefficient row of length n (summing duplicate terms).
  Eigen::RowVectorXd row(int n) const;
  double eval(const Eigen::VectorXd& x) const;

 private:
  std::vector<std::pair<int, double>> terms_;
  double constant_ = 0.0;
};

// svec packs a symmetric matrix column-major over the lower triangle with
// off-diagonals scaled by sqrt(2), so <A,B> = svec(A).svec(B).
int svec_dim(int side);
Eigen::VectorXd svec(const Eigen::MatrixXd& S);
Eigen::MatrixXd smat(const Eigen::VectorXd& v);

/// Real embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian matrix.
/// PSD-ness is preserved both ways and Tr(H X) = 1/2 Tr(realify(H) realify(X)).
/// Throws for inputs that are not Hermitian within `tol`.
Eigen::MatrixXd realify_hermitian_block(const Eigen::MatrixXcd& H, double tol = 1e-9);

/// Averaging inverse of the real embedding; exact on structured inputs.
Eigen::MatrixXcd recover_hermitian(const Eigen::MatrixXd& X);

enum class ConicStatus { Optimal, Infeasible, Unbounded, NumericalTrouble };

const char* to_string(ConicStatus s);

struct KktResiduals {
  double primal_res = 0.0;
  double dual_res = 0.0;
  double gap = 0.0;

  double max() const;
};

struct ConicSolution {
  ConicStatus status = ConicStatus::NumericalTrouble;
  Eigen::VectorXd x;
  Eigen::VectorXd eq_duals;
  std::vector<Eigen::VectorXd> cone_duals;  // per cone constraint, svec coords for Psd
  double objective = 0.0;                   // in the problem's (maximize) sense
  double dual_objective = 0.0;
  KktResiduals residuals;
  int iterations = 0;
};

struct SolverOptions {
  double tol = 1e-7;
  int max_iter = 200;
};

class ConicProblem {
 public:
  int add_variable(std::string name = {});
  /// Adds a symmetric side x side matrix variable as its lower-triangle
  /// entries (column-major) plus a PSD membership constraint.
  /// Returns the index of the first entry variable.
  int add_psd_variable_block(int side, const std::string& name);

  void set_objective(LinExpr objective);  // maximized
  void add_equality(LinExpr lhs, LinExpr rhs = LinExpr(0.0));
  void add_nonneg(LinExpr expr);                               // expr >= 0
  void add_second_order(std::vector<LinExpr> rows);            // r0 >= ||r1:||
  void add_rotated_second_order(std::vector<LinExpr> rows);    // 2 r0 r1 >= ||r2:||^2
  /// Schur-complement encoding of [[a, v], [v, b]] >= 0 as the rotated
  /// second-order constraint a b >= v^2 with a, b >= 0.
  void add_schur_2x2(LinExpr a, LinExpr b, LinExpr v);
  /// Lower triangle of `entries` (entries[i][j], i >= j) interpreted as a
  /// symmetric matrix constrained PSD.
  void add_psd(const std::vector<std::vector<LinExpr>>& entries);

  /// Tr(C . X) for the symmetric matrix variable block starting at `offset`.
  LinExpr trace_expr(const Eigen::MatrixXd& coeff, int offset) const;
  /// Entry expression X(i, j) for the block starting at `offset`.
  LinExpr psd_entry(int offset, int side, int i, int j) const;

  int variable_count() const { return static_cast<int>(names_.size()); }
  const std::string& variable_name(int i) const { return names_[i]; }
  Eigen::VectorXd extract_psd_block(const Eigen::VectorXd& x, int offset, int side) const;
  /// Dense symmetric matrix value of a PSD variable block.
  Eigen::MatrixXd psd_block_value(const Eigen::VectorXd& x, int offset, int side) const;

  void dump(std::ostream& os) const;

  struct ConeConstraint {
    ConeSpec spec;
    std::vector<LinExpr> rows;
  };
  const std::vector<ConeConstraint>& cones() const { return cones_; }
  const std::vector<LinExpr>& equalities() const { return equalities_; }
  const LinExpr& objective() const { return objective_; }

 private:
  std::vector<std::string> names_;
  LinExpr objective_;
  std::vector<LinExpr> equalities_;
  std::vector<ConeConstraint> cones_;
};

ConicSolution solve(const ConicProblem& problem, const SolverOptions& options = {});

}  // namespace swiptnoma::conic
