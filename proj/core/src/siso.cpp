#include "swiptnoma/siso.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace swiptnoma::siso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Multiplied-out constraint forms, safe at the alpha/beta box edges.
bool decode_constraint_ok(double alpha, double beta, const SisoInstance& in,
                          double gamma1, double tol) {
  return (1.0 - beta) * alpha * in.h2 -
             gamma1 * ((1.0 - beta) * (1.0 - alpha) * in.h2 + 1.0) >=
         -tol;
}

bool qos_constraint_ok(double alpha, double beta, const SisoInstance& in, double gamma1,
                       double tol) {
  return alpha * in.h1 + (beta * in.h2 * in.g - gamma1) * ((1.0 - alpha) * in.h1 + 1.0) >=
         -tol;
}

}  // namespace

BetaInterval feasible_beta_interval(const SisoInstance& inst, double gamma1) {
  BetaInterval iv;
  const double num = std::max(gamma1 - inst.h1, 0.0);
  const double h2g = inst.h2 * inst.g;
  iv.beta_min = (num == 0.0) ? 0.0 : (h2g > 0.0 ? num / h2g : kInf);
  iv.beta_max = 1.0 - gamma1 / inst.h2;
  iv.feasible = iv.beta_max >= 0.0 && iv.beta_min <= iv.beta_max;
  return iv;
}

std::optional<double> optimal_alpha(double beta, const SisoInstance& inst, double gamma1) {
  if (beta >= 1.0) throw std::invalid_argument("optimal_alpha requires beta < 1");
  const double h2g = inst.h2 * inst.g;
  const double A = gamma1 * ((1.0 - beta) * inst.h2 + 1.0) /
                   ((1.0 + gamma1) * (1.0 - beta) * inst.h2);
  double alpha;
  if (h2g > 0.0 && beta >= gamma1 / h2g) {
    alpha = std::min(A, 1.0);
  } else {
    const double B = (gamma1 - beta * h2g) * (inst.h1 + 1.0) /
                     ((gamma1 + 1.0 - beta * h2g) * inst.h1);
    alpha = std::min(std::max(A, B), 1.0);
  }
  const double tol = 1e-9 * std::max({1.0, gamma1, inst.h2, inst.h1});
  if (alpha < 0.0 || !decode_constraint_ok(alpha, beta, inst, gamma1, tol) ||
      !qos_constraint_ok(alpha, beta, inst, gamma1, tol))
    return std::nullopt;
  return alpha;
}

double evaluate_h(double beta, const SisoInstance& inst, double gamma1) {
  if (beta >= 1.0) return -kInf;
  const auto alpha = optimal_alpha(beta, inst, gamma1);
  if (!alpha) return -kInf;
  return (1.0 - *alpha) * (1.0 - beta) * inst.h2;
}

SisoSolution gss_solve(const SisoInstance& inst, double gamma1, const GssOptions& opt) {
  SisoSolution sol;
  const BetaInterval iv = feasible_beta_interval(inst, gamma1);
  if (!iv.feasible) {
    sol.status = SolveStatus::Infeasible;
    return sol;
  }
  double lo = opt.search_unit_interval ? 0.0 : iv.beta_min;
  double hi = opt.search_unit_interval ? 1.0 : iv.beta_max;
  const double a = opt.ratio;
  int iters = 0;
  while (hi - lo > opt.eps) {
    const double b1 = lo + (1.0 - a) * (hi - lo);
    const double b2 = lo + a * (hi - lo);
    // ties shrink from the right; immaterial under strict unimodality
    if (evaluate_h(b1, inst, gamma1) >= evaluate_h(b2, inst, gamma1))
      hi = b2;
    else
      lo = b1;
    ++iters;
    sol.objective_trace.push_back(evaluate_h(0.5 * (lo + hi), inst, gamma1));
  }
  sol.beta = 0.5 * (lo + hi);
  const auto alpha = optimal_alpha(sol.beta, inst, gamma1);
  if (!alpha) {
    // only reachable in unit-interval fidelity mode on infeasible midpoints
    sol.status = SolveStatus::Infeasible;
    return sol;
  }
  sol.alpha = *alpha;
  sol.objective = (1.0 - sol.alpha) * (1.0 - sol.beta) * inst.h2;
  sol.iterations = iters;
  sol.status = SolveStatus::Optimal;
  return sol;
}

BruteForceResult brute_force_siso(const SisoInstance& inst, double gamma1, int grid_n) {
  if (grid_n < 2) throw std::invalid_argument("grid_n must be >= 2");
  BruteForceResult best;
  best.objective = -kInf;
  const double step = 1.0 / (grid_n - 1);
  for (int ib = 0; ib < grid_n; ++ib) {
    const double beta = ib * step;
    if (beta >= 1.0) continue;  // objective 0 and decode constraint unsatisfiable
    const double obj_factor = (1.0 - beta) * inst.h2;
    for (int ia = 0; ia < grid_n; ++ia) {
      const double alpha = ia * step;
      if (!decode_constraint_ok(alpha, beta, inst, gamma1, 0.0)) continue;
      if (!qos_constraint_ok(alpha, beta, inst, gamma1, 0.0)) continue;
      const double obj = (1.0 - alpha) * obj_factor;
      if (obj > best.objective) best = {alpha, beta, obj, true};
      break;  // objective strictly decreases in alpha at fixed beta
    }
  }
  if (!best.feasible) best.objective = 0.0;
  return best;
}

double f_of_beta(double beta, const SisoInstance& inst, double gamma1) {
  const double h2g = inst.h2 * inst.g;
  const double B = (gamma1 - beta * h2g) * (inst.h1 + 1.0) /
                   ((gamma1 + 1.0 - beta * h2g) * inst.h1);
  return B * beta - B - beta;
}

double f_prime(double beta, const SisoInstance& inst, double gamma1) {
  const double h2g = inst.h2 * inst.g;
  const double den_root = (gamma1 - beta * h2g + 1.0) * inst.h1;
  if (den_root == 0.0) throw std::invalid_argument("f_prime denominator is zero");
  const double num = (h2g * h2g * beta * beta - 2.0 * h2g * (gamma1 + 1.0) * beta + h2g +
                      gamma1 * gamma1 + gamma1) *
                     inst.h1 * (inst.h1 + 1.0);
  return num / (den_root * den_root) - 1.0;
}

double delta_sign(double beta, const SisoInstance& inst, double gamma1) {
  const double h2g = inst.h2 * inst.g;
  const double t = h2g * beta - (gamma1 + 1.0);
  return inst.h1 * t * t + inst.h1 * (h2g - (gamma1 + 1.0)) * (inst.h1 + 1.0);
}

}  // namespace swiptnoma::siso
