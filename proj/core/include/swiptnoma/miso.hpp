#pragma once

#include "swiptnoma/channel.hpp"
#include "swiptnoma/conic.hpp"
#include "swiptnoma/system.hpp"

namespace swiptnoma::miso {

/// Outer products H_i = h_i h_i^H plus their halved real embeddings, which
/// turn complex traces into real ones: Tr(H W) = <realified(H)/2, X>.
struct SdrMatrices {
  CMat H1, H2;
  Eigen::MatrixXd H1_real_half, H2_real_half;
  int side = 0;  // realified side, 2 N_t

  static SdrMatrices from_instance(const MisoInstance& inst);
};

/// A built subproblem together with the variable handles needed to read a
/// solution back out.
struct SdrProblem {
  conic::ConicProblem problem;
  int w1_offset = 0;
  int w2_offset = 0;
  int side = 0;
  // P5 scalar variables (unset for P3)
  int u_var = -1, v_var = -1, t_var = -1, x_var = -1, beta_var = -1;
};

struct SdrPoint {
  conic::ConicStatus status = conic::ConicStatus::NumericalTrouble;
  CMat W1, W2;
  double objective = 0.0;  // (1-beta) Tr(H2 W2)
  double tr_h1w1 = 0.0, tr_h1w2 = 0.0, tr_h2w1 = 0.0, tr_h2w2 = 0.0;
  double u = 0.0, v = 0.0, t = 0.0, x = 0.0, beta = 0.0;
  conic::KktResiduals residuals;
};

/// Fixed-(beta, x) linear SDP in (W1, W2):
///   max (1-beta) Tr(H2 W2)
///   s.t. Tr(H2 W1) - gamma1 Tr(H2 W2) >= gamma1 / (1-beta)
///        Tr(H1 W1) - x Tr(H1 W2) >= x
///        Tr(H2 (W1+W2)) >= (gamma1 - x) / (beta g)
///        Tr(W1 + W2) <= 1,  W1, W2 psd.
/// At beta g = 0 the third row degenerates to the requirement x >= gamma1.
SdrProblem build_p3(const MisoInstance& inst, double beta, double x, double gamma1);

/// Convex inner approximation solved at every SCA iteration, with Taylor
/// rows around (v_n, t_n) and the AGM surrogate with weight a_n.
SdrProblem build_p5(const MisoInstance& inst, double gamma1, double v_n, double t_n,
                    double a_n);

SdrPoint solve_sdr(const SdrProblem& prob, const MisoInstance& inst, double beta_fixed,
                   const conic::SolverOptions& opts = {});

/// AGM weight update a = sqrt(Tr(H1 W2) / x) with the small-x clamp.
double agm_update(double tr_h1w2_prev, double x_prev);

struct ExtractionResult {
  CVec w1, w2;
  double r_lambda = 0.0;  // min over nonzero W of lambda1/lambda2
  bool ok = false;
  bool used_randomization = false;
};

/// Rank-one beamformer recovery: principal eigenvectors when the second
/// eigenvalue is negligible, otherwise Gaussian randomization with power
/// rescaling, keeping the best candidate that passes the joint constraints.
ExtractionResult extract_beamformers(const CMat& W1, const CMat& W2,
                                     const MisoInstance& inst, double beta,
                                     double gamma1, Rng& rng, int n_randomizations = 100);

struct ExhaustiveOptions {
  int grid_beta = 101;
  int grid_x = 101;
  conic::SolverOptions solver;
};

/// Two-dimensional lattice search over (beta, x) solving the linear SDP at
/// every surviving point; the near-global reference for the SCA method.
MisoSolution exhaustive_search(const MisoInstance& inst, double gamma1,
                               const ExhaustiveOptions& opts = {});

struct ScaOptions {
  double eps = 1e-4;
  int max_iter = 150;
  conic::SolverOptions solver;
  int randomizations = 100;
};

/// Successive convex approximation: seeds the linearization from a coarse
/// restoration solve, then iterates the convex subproblem until the
/// surrogate objective stalls.
MisoSolution sca_solve(const MisoInstance& inst, double gamma1, Rng& rng,
                       const ScaOptions& opts = {});

}  // namespace swiptnoma::miso
