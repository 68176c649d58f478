#pragma once

#include <optional>

#include "swiptnoma/system.hpp"

namespace swiptnoma::siso {

/// Feasible range of the power-splitting ratio:
/// beta_min = (gamma1 - h1)^+ / (h2 g), beta_max = 1 - gamma1 / h2.
struct BetaInterval {
  double beta_min = 0.0;
  double beta_max = 0.0;
  bool feasible = false;

  double length() const { return beta_max - beta_min; }
};

BetaInterval feasible_beta_interval(const SisoInstance& inst, double gamma1);

/// Closed-form optimal power allocation at fixed beta:
///   A = gamma1 ((1-b)h2 + 1) / ((1+gamma1)(1-b)h2)
///   B = (gamma1 - b h2 g)(h1 + 1) / ((gamma1 + 1 - b h2 g) h1)
///   alpha = min{A, 1}                if b >= gamma1/(h2 g)
///         = min{max{A, B}, 1}        otherwise
/// Returns nullopt when the resulting alpha violates a constraint, which can
/// only happen outside the feasible beta interval. Throws for beta >= 1.
std::optional<double> optimal_alpha(double beta, const SisoInstance& inst, double gamma1);

/// Inner objective h(beta) = (1 - alpha(beta)) (1 - beta) h2, or -inf when no
/// feasible alpha exists at this beta.
double evaluate_h(double beta, const SisoInstance& inst, double gamma1);

struct GssOptions {
  double eps = 1e-4;           // terminal bracket length
  double ratio = 0.618;        // golden contraction parameter
  bool search_unit_interval = false;  // search [0,1] instead of the feasible range
};

/// Golden-section search over beta with the closed-form inner solution.
SisoSolution gss_solve(const SisoInstance& inst, double gamma1, const GssOptions& = {});

struct BruteForceResult {
  double alpha = 0.0;
  double beta = 0.0;
  double objective = 0.0;
  bool feasible = false;
};

/// Exhaustive lattice oracle over (alpha, beta) in [0,1]^2 keeping only
/// points satisfying both constraints. Independent of the closed forms.
BruteForceResult brute_force_siso(const SisoInstance& inst, double gamma1, int grid_n);

/// f(beta) = B beta - B - beta, the objective surrogate on the branch where
/// the QoS constraint is active.
double f_of_beta(double beta, const SisoInstance& inst, double gamma1);

/// Closed-form derivative of f:
/// ((h2^2 g^2 b^2 - 2 h2 g (g1+1) b + h2 g + g1^2 + g1) h1 (h1+1))
///   / ((g1 - b h2 g + 1)^2 h1^2) - 1.
double f_prime(double beta, const SisoInstance& inst, double gamma1);

/// Sign surrogate for f': h1 (h2 g b - (g1+1))^2 + h1 (h2 g - (g1+1)) (h1+1),
/// the difference between numerator and denominator of f' + 1.
double delta_sign(double beta, const SisoInstance& inst, double gamma1);

}  // namespace swiptnoma::siso
