#include "swiptnoma/miso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swiptnoma::miso {

using conic::ConicStatus;
using conic::LinExpr;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRankOneRatio = 1e-6;  // second eigenvalue threshold

double tr_complex(const CMat& C, const CMat& W) { return (C * W).trace().real(); }

}  // namespace

SdrMatrices SdrMatrices::from_instance(const MisoInstance& inst) {
  SdrMatrices m;
  m.H1 = inst.h1_vec * inst.h1_vec.adjoint();
  m.H2 = inst.h2_vec * inst.h2_vec.adjoint();
  m.H1_real_half = 0.5 * conic::realify_hermitian_block(m.H1);
  m.H2_real_half = 0.5 * conic::realify_hermitian_block(m.H2);
  m.side = 2 * inst.nt();
  return m;
}

SdrProblem build_p3(const MisoInstance& inst, double beta, double x, double gamma1) {
  if (beta < 0.0 || beta >= 1.0) throw std::invalid_argument("build_p3 needs beta in [0,1)");
  if (x < 0.0) throw std::invalid_argument("build_p3 needs x >= 0");
  const SdrMatrices M = SdrMatrices::from_instance(inst);

  SdrProblem sp;
  sp.side = M.side;
  auto& p = sp.problem;
  sp.w1_offset = p.add_psd_variable_block(M.side, "W1");
  sp.w2_offset = p.add_psd_variable_block(M.side, "W2");
  const LinExpr tr_h2w1 = p.trace_expr(M.H2_real_half, sp.w1_offset);
  const LinExpr tr_h2w2 = p.trace_expr(M.H2_real_half, sp.w2_offset);
  const LinExpr tr_h1w1 = p.trace_expr(M.H1_real_half, sp.w1_offset);
  const LinExpr tr_h1w2 = p.trace_expr(M.H1_real_half, sp.w2_offset);
  const Eigen::MatrixXd half_eye = 0.5 * Eigen::MatrixXd::Identity(M.side, M.side);

  p.set_objective((1.0 - beta) * tr_h2w2);
  p.add_nonneg(tr_h2w1 - gamma1 * tr_h2w2 - gamma1 / (1.0 - beta));
  p.add_nonneg(tr_h1w1 - x * tr_h1w2 - x);
  const double bg = beta * inst.g;
  if (bg > 1e-300)
    p.add_nonneg(tr_h2w1 + tr_h2w2 - (gamma1 - x) / bg);
  else
    p.add_nonneg(LinExpr(x - gamma1));  // harvested term vanishes
  p.add_nonneg(1.0 - p.trace_expr(half_eye, sp.w1_offset) -
               p.trace_expr(half_eye, sp.w2_offset));
  return sp;
}

SdrProblem build_p5(const MisoInstance& inst, double gamma1, double v_n, double t_n,
                    double a_n) {
  if (!(std::isfinite(v_n) && std::isfinite(t_n) && std::isfinite(a_n)) || a_n <= 0.0)
    throw std::invalid_argument("build_p5 needs finite iterates and a_n > 0");
  const SdrMatrices M = SdrMatrices::from_instance(inst);

  SdrProblem sp;
  sp.side = M.side;
  auto& p = sp.problem;
  sp.u_var = p.add_variable("u");
  sp.v_var = p.add_variable("v");
  sp.t_var = p.add_variable("t");
  sp.x_var = p.add_variable("x");
  sp.beta_var = p.add_variable("beta");
  sp.w1_offset = p.add_psd_variable_block(M.side, "W1");
  sp.w2_offset = p.add_psd_variable_block(M.side, "W2");

  const LinExpr u = LinExpr::var(sp.u_var), v = LinExpr::var(sp.v_var);
  const LinExpr t = LinExpr::var(sp.t_var), x = LinExpr::var(sp.x_var);
  const LinExpr beta = LinExpr::var(sp.beta_var);
  const LinExpr tr_h2w1 = p.trace_expr(M.H2_real_half, sp.w1_offset);
  const LinExpr tr_h2w2 = p.trace_expr(M.H2_real_half, sp.w2_offset);
  const LinExpr tr_h1w1 = p.trace_expr(M.H1_real_half, sp.w1_offset);
  const LinExpr tr_h1w2 = p.trace_expr(M.H1_real_half, sp.w2_offset);
  const Eigen::MatrixXd half_eye = 0.5 * Eigen::MatrixXd::Identity(M.side, M.side);

  p.set_objective(u);
  // Taylor rows around the current iterate
  p.add_nonneg(2.0 * v_n * v - v_n * v_n - u);
  p.add_nonneg(2.0 * t_n * t - t_n * t_n - (gamma1 - x));
  // AGM surrogate (a x)^2 + (Tr(H1 W2)/a)^2 <= 2 Tr(H1 W1) - 2x
  p.add_rotated_second_order({tr_h1w1 - x, LinExpr(1.0), a_n * x, (1.0 / a_n) * tr_h1w2});
  // decode row (Tr(H2W1) - g1 Tr(H2W2)) (1 - beta) >= g1
  p.add_rotated_second_order(
      {tr_h2w1 - gamma1 * tr_h2w2, 1.0 - beta, LinExpr(std::sqrt(2.0 * gamma1))});
  // epigraph LMIs
  p.add_schur_2x2(1.0 - beta, tr_h2w2, v);
  p.add_schur_2x2(inst.g * beta, tr_h2w1 + tr_h2w2, t);
  // power cap, box constraints
  p.add_nonneg(1.0 - p.trace_expr(half_eye, sp.w1_offset) -
               p.trace_expr(half_eye, sp.w2_offset));
  p.add_nonneg(beta);
  p.add_nonneg(1.0 - 1e-9 - beta);
  p.add_nonneg(x);
  return sp;
}

SdrPoint solve_sdr(const SdrProblem& prob, const MisoInstance& inst, double beta_fixed,
                   const conic::SolverOptions& opts) {
  const auto sol = conic::solve(prob.problem, opts);
  SdrPoint pt;
  pt.status = sol.status;
  pt.residuals = sol.residuals;
  // a NumericalTrouble return still carries the most accurate iterate seen
  if (sol.status == ConicStatus::Infeasible || sol.status == ConicStatus::Unbounded)
    return pt;

  pt.W1 = conic::recover_hermitian(prob.problem.psd_block_value(sol.x, prob.w1_offset,
                                                                prob.side));
  pt.W2 = conic::recover_hermitian(prob.problem.psd_block_value(sol.x, prob.w2_offset,
                                                                prob.side));
  const SdrMatrices M = SdrMatrices::from_instance(inst);
  pt.tr_h1w1 = tr_complex(M.H1, pt.W1);
  pt.tr_h1w2 = tr_complex(M.H1, pt.W2);
  pt.tr_h2w1 = tr_complex(M.H2, pt.W1);
  pt.tr_h2w2 = tr_complex(M.H2, pt.W2);
  if (prob.beta_var >= 0) {
    pt.u = sol.x(prob.u_var);
    pt.v = sol.x(prob.v_var);
    pt.t = sol.x(prob.t_var);
    pt.x = sol.x(prob.x_var);
    pt.beta = sol.x(prob.beta_var);
  } else {
    pt.beta = beta_fixed;
  }
  pt.objective = (1.0 - pt.beta) * pt.tr_h2w2;
  return pt;
}

double agm_update(double tr_h1w2_prev, double x_prev) {
  const double x = std::max(x_prev, 1e-12);
  const double a = std::sqrt(std::max(tr_h1w2_prev, 0.0) / x);
  return std::clamp(a, 1e-8, 1e8);  // keep the surrogate well posed when W2 ~ 0
}

ExtractionResult extract_beamformers(const CMat& W1, const CMat& W2,
                                     const MisoInstance& inst, double beta,
                                     double gamma1, Rng& rng, int n_randomizations) {
  const int n = static_cast<int>(W1.rows());
  ExtractionResult out;

  Eigen::SelfAdjointEigenSolver<CMat> es1(W1), es2(W2);
  const Eigen::VectorXd ev1 = es1.eigenvalues(), ev2 = es2.eigenvalues();
  const double l1a = ev1(n - 1), l1b = n > 1 ? ev1(n - 2) : 0.0;
  const double l2a = ev2(n - 1), l2b = n > 1 ? ev2(n - 2) : 0.0;
  const double floor1 = 64.0 * std::numeric_limits<double>::epsilon() * std::max(l1a, 1e-30);
  const double floor2 = 64.0 * std::numeric_limits<double>::epsilon() * std::max(l2a, 1e-30);

  const double total = W1.trace().real() + W2.trace().real();
  const bool w2_zero = l2a <= 1e-9 * std::max(total, 1e-30);
  double r1 = (l1b <= floor1) ? kInf : l1a / l1b;
  double r2 = (l2b <= floor2) ? kInf : l2a / l2b;
  out.r_lambda = w2_zero ? r1 : std::min(r1, r2);

  const bool rank1_1 = l1b <= kRankOneRatio * std::max(l1a, 1e-300);
  const bool rank1_2 = w2_zero || l2b <= kRankOneRatio * std::max(l2a, 1e-300);
  if (rank1_1 && rank1_2) {
    out.w1 = std::sqrt(std::max(l1a, 0.0)) * es1.eigenvectors().col(n - 1);
    out.w2 = w2_zero ? CVec(CVec::Zero(n))
                     : CVec(std::sqrt(std::max(l2a, 0.0)) * es2.eigenvectors().col(n - 1));
    out.ok = true;
    return out;
  }

  // Gaussian randomization with power rescaling
  out.used_randomization = true;
  const CMat S1 = es1.eigenvectors() *
                  ev1.cwiseMax(0.0).cwiseSqrt().asDiagonal() * es1.eigenvectors().adjoint();
  const CMat S2 = es2.eigenvectors() *
                  ev2.cwiseMax(0.0).cwiseSqrt().asDiagonal() * es2.eigenvectors().adjoint();
  double best = -kInf;
  for (int k = 0; k < n_randomizations; ++k) {
    CVec xi1(n), xi2(n);
    for (int i = 0; i < n; ++i) {
      xi1(i) = rng.cnormal();
      xi2(i) = rng.cnormal();
    }
    CVec w1 = S1 * xi1, w2 = S2 * xi2;
    const double pw = w1.squaredNorm() + w2.squaredNorm();
    if (pw > 1.0) {
      const double sc = 1.0 / std::sqrt(pw);
      w1 *= sc;
      w2 *= sc;
    }
    const auto rep = check_p1_feasibility(inst, w1, w2, beta, gamma1, 1e-6);
    if (!rep.feasible) continue;
    const double obj = (1.0 - beta) * std::norm(inst.h2_vec.dot(w2));
    if (obj > best) {
      best = obj;
      out.w1 = w1;
      out.w2 = w2;
      out.ok = true;
    }
  }
  return out;
}

MisoSolution exhaustive_search(const MisoInstance& inst, double gamma1,
                               const ExhaustiveOptions& opts) {
  if (opts.grid_beta < 2 || opts.grid_x < 2)
    throw std::invalid_argument("exhaustive grids need >= 2 points");
  MisoSolution best;
  best.objective = -kInf;
  best.status = SolveStatus::Infeasible;

  const SdrMatrices M = SdrMatrices::from_instance(inst);
  Eigen::SelfAdjointEigenSolver<CMat> e1(M.H1, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<CMat> e2(M.H2, Eigen::EigenvaluesOnly);
  const double l1max = e1.eigenvalues().maxCoeff();
  const double l2max = e2.eigenvalues().maxCoeff();

  int solved = 0;
  double best_beta = 0.0, best_x = 0.0;
  SdrPoint best_pt;
  for (int ib = 0; ib < opts.grid_beta; ++ib) {
    const double beta = static_cast<double>(ib) / (opts.grid_beta - 1);
    if (beta >= 1.0) continue;  // decode row unsatisfiable
    if (l2max < gamma1 / (1.0 - beta)) continue;  // cannot meet the decode row
    for (int ix = 0; ix < opts.grid_x; ++ix) {
      const double x = gamma1 * static_cast<double>(ix) / (opts.grid_x - 1);
      if (l1max < x) continue;  // Tr(H1 W1) <= lmax under the unit trace cap
      const double bg = beta * inst.g;
      if (bg > 1e-300 && l2max < (gamma1 - x) / bg) continue;
      if (bg <= 1e-300 && x < gamma1) continue;
      SdrProblem sp = build_p3(inst, beta, x, gamma1);
      SdrPoint pt = solve_sdr(sp, inst, beta, opts.solver);
      ++solved;
      if (pt.status != ConicStatus::Optimal) continue;
      if (pt.objective > best.objective) {
        best.objective = pt.objective;
        best_beta = beta;
        best_x = x;
        best_pt = pt;
        best.status = SolveStatus::Optimal;
      }
    }
  }
  best.iterations = solved;
  if (best.status != SolveStatus::Optimal) {
    best.objective = 0.0;
    return best;
  }
  best.beta = best_beta;
  best.W1 = best_pt.W1;
  best.W2 = best_pt.W2;
  Rng rng(0x5eed5eedULL ^ static_cast<std::uint64_t>(solved));
  auto ext = extract_beamformers(best.W1, best.W2, inst, best.beta, gamma1, rng);
  best.w1 = ext.w1;
  best.w2 = ext.w2;
  best.eig_ratio_lambda = ext.r_lambda;
  best.extraction_ok = ext.ok;
  (void)best_x;
  return best;
}

namespace {

struct ScaAttempt {
  SdrPoint last;
  std::vector<IterationRecord> trace;
  bool converged = false;
  int iterations = 0;
};

ScaAttempt run_sca_loop(const MisoInstance& inst, double gamma1, const SdrPoint& seed,
                        double seed_beta, double seed_x, const ScaOptions& opts) {
  ScaAttempt at;
  at.last = seed;
  at.last.beta = seed_beta;
  at.last.objective = (1.0 - seed_beta) * seed.tr_h2w2;
  double v_n =
      std::max(std::sqrt(std::max((1.0 - seed_beta) * seed.tr_h2w2, 0.0)), 1e-6);
  double t_n = std::max(std::sqrt(std::max(gamma1 - seed_x, 0.0)), 1e-6);
  double a_n = agm_update(seed.tr_h1w2, seed_x);
  double u_prev = -kInf;
  const double u_floor = at.last.objective - 1e-6 * (1.0 + std::abs(at.last.objective));
  while (at.iterations < opts.max_iter) {
    SdrProblem sp = build_p5(inst, gamma1, v_n, t_n, a_n);
    SdrPoint pt = solve_sdr(sp, inst, 0.0, opts.solver);
    // Degenerate faces (beta pinned at a corner) can stall the subsolver a
    // shade above its tolerance. Such near-solutions are accepted only when
    // they keep the surrogate monotone, so the trace stays trustworthy.
    const bool exact = pt.status == ConicStatus::Optimal;
    const bool approx = pt.status == ConicStatus::NumericalTrouble &&
                        pt.residuals.max() <= 1e-5 && pt.u >= u_floor;
    if (!exact && !approx) break;
    if (pt.u < u_prev) break;  // the recorded trace never dips
    ++at.iterations;
    at.last = pt;
    const double delta = std::abs(pt.u - u_prev);
    at.trace.push_back({at.iterations, pt.u, delta, pt.objective, pt.residuals.max()});
    u_prev = pt.u;
    v_n = std::max(pt.v, 1e-9);
    t_n = std::max(pt.t, 1e-9);
    a_n = agm_update(pt.tr_h1w2, pt.x);
    if (delta < opts.eps) {
      at.converged = true;
      break;
    }
  }
  return at;
}

}  // namespace

MisoSolution sca_solve(const MisoInstance& inst, double gamma1, Rng& rng,
                       const ScaOptions& opts) {
  MisoSolution sol;
  sol.status = SolveStatus::Infeasible;

  // Restoration candidates: the coarse midpoint first, then a grid.
  // x = gamma1 makes the harvested-power row vacuous (the only feasible
  // corner for a dead relay link); x near 0 matters when the direct user-1
  // link is too weak to carry any of the QoS target.
  std::vector<std::pair<double, double>> candidates = {{0.5, 0.5 * gamma1}};
  for (double b : {0.1, 0.3, 0.5, 0.7, 0.9})
    for (double xf : {1.0, 0.0, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95})
      candidates.emplace_back(b, xf * gamma1);

  bool any_seed = false;
  ScaAttempt best;
  int attempts = 0;
  for (const auto& [b, x] : candidates) {
    if (attempts >= 3) break;
    SdrPoint seed = solve_sdr(build_p3(inst, b, x, gamma1), inst, b, opts.solver);
    if (seed.status != ConicStatus::Optimal) continue;
    any_seed = true;
    ++attempts;
    ScaAttempt at = run_sca_loop(inst, gamma1, seed, b, x, opts);
    const bool take = attempts == 1 || (at.converged && !best.converged) ||
                      (at.converged == best.converged &&
                       at.last.objective > best.last.objective);
    if (take) best = std::move(at);
    if (best.converged) break;  // a stalled run restarts from the next seed
  }
  if (!any_seed) return sol;  // Infeasible

  // When the loop ended on an approximately-solved subproblem, re-solve the
  // fixed-point SDP there so the returned matrices are feasible to full
  // solver tolerance.
  if (best.last.residuals.max() > opts.solver.tol && best.iterations > 0) {
    const double beta_fix = std::clamp(best.last.beta, 0.0, 1.0 - 1e-9);
    const double x_fix = std::max(best.last.x, 0.0);
    SdrPoint polished =
        solve_sdr(build_p3(inst, beta_fix, x_fix, gamma1), inst, beta_fix, opts.solver);
    if (polished.status == ConicStatus::Optimal) {
      polished.beta = beta_fix;
      polished.objective = (1.0 - beta_fix) * polished.tr_h2w2;
      best.last = polished;
    }
  }

  sol.status = best.converged ? SolveStatus::Stationary : SolveStatus::MaxIter;
  sol.iterations = best.iterations;
  sol.trace = std::move(best.trace);
  sol.beta = best.last.beta;
  sol.W1 = best.last.W1;
  sol.W2 = best.last.W2;
  sol.objective = best.last.objective;
  auto ext = extract_beamformers(best.last.W1, best.last.W2, inst, best.last.beta,
                                 gamma1, rng, opts.randomizations);
  sol.w1 = ext.w1;
  sol.w2 = ext.w2;
  sol.eig_ratio_lambda = ext.r_lambda;
  sol.extraction_ok = ext.ok;
  return sol;
}

}  // namespace swiptnoma::miso
