#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace swiptnoma {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Static link/system parameters shared by the solvers and the harness.
///
/// Powers are in dBm. `noise_is_density == false` reads `noise_power_dbm`
/// as the total in-band noise power; `true` reads it as a per-Hz density
/// and scales by `bandwidth_hz` when instances are sampled.
struct SystemParams {
  double transmit_power_dbm = 30.0;
  double noise_power_dbm = -90.0;
  double sinr_target_gamma1 = 1.0;   // linear SINR target for user 1
  int antenna_count_nt = 2;
  double rician_k = 3.0;
  double pathloss_exp_user1 = 4.0;
  double pathloss_exp_user2 = 2.0;
  double bandwidth_hz = 1e6;
  double stage_fraction_tau = 0.5;   // both protocol stages last tau = 1/2
  bool noise_is_density = false;

  void validate() const;             // throws std::invalid_argument
  double transmit_power_mw() const;
  double noise_power_mw() const;     // total in-band noise, after density scaling
};

/// One scalar-channel realization: normalized power gains, all > 0 for a
/// physically sampled instance. `checked()` enforces that; aggregate
/// construction stays available for algorithmic edge cases (e.g. g = 0,
/// which the feasibility analysis handles explicitly).
struct SisoInstance {
  double h1 = 0.0;  // BS -> user 1
  double h2 = 0.0;  // BS -> user 2
  double g = 0.0;   // user 2 -> user 1 relay link

  static SisoInstance checked(double h1, double h2, double g);
};

/// One vector-channel realization. h vectors carry the sqrt(P_s)/sigma
/// normalization; g is the raw relay-link power gain (the relay's transmit
/// power already rides on the harvested |h2^H w|^2 terms).
struct MisoInstance {
  CVec h1_vec;
  CVec h2_vec;
  double g = 0.0;

  int nt() const { return static_cast<int>(h1_vec.size()); }
  /// Scalar view; valid when nt() == 1.
  SisoInstance as_siso() const;

  static MisoInstance checked(CVec h1, CVec h2, double g);
};

enum class SolveStatus { Optimal, Stationary, Infeasible, MaxIter };

const char* to_string(SolveStatus s);

/// Per-iteration SCA trace entry (surrogate objective and subproblem health).
struct IterationRecord {
  int iteration = 0;
  double surrogate_objective = 0.0;  // u^(n)
  double delta = 0.0;                // |u^(n) - u^(n-1)|
  double objective = 0.0;            // (1-beta) Tr(H2 W2) at the iterate
  double max_kkt_residual = 0.0;
};

struct MisoSolution {
  CVec w1, w2;                       // beamformers (empty if extraction failed)
  CMat W1, W2;                       // Hermitian PSD covariance-style matrices
  double beta = 0.0;
  double objective = 0.0;            // SNR of user 2, (1-beta)|h2^H w2|^2
  int iterations = 0;
  double eig_ratio_lambda = 0.0;     // R_lambda; +inf for numerically rank-one
  SolveStatus status = SolveStatus::Infeasible;
  bool extraction_ok = false;
  std::vector<IterationRecord> trace;
};

struct SisoSolution {
  double alpha = 0.0;                // power fraction for x1
  double beta = 0.0;
  double objective = 0.0;            // (1-alpha)(1-beta) h2
  int iterations = 0;
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> objective_trace;  // h at the bracket midpoint per iteration
};

/// Stage-1 SINR at user 1: |h1^H w1|^2 / (|h1^H w2|^2 + 1).
double sinr_stage1_user1(const MisoInstance& inst, const CVec& w1, const CVec& w2);

/// MRC-combined SINR at user 1 after both stages:
/// stage-1 SINR plus beta * g * (|h2^H w1|^2 + |h2^H w2|^2).
double equivalent_sinr_user1(const MisoInstance& inst, const CVec& w1,
                             const CVec& w2, double beta);

/// Normalized transmit power available at user 2 for relaying:
/// beta * (|h2^H w1|^2 + |h2^H w2|^2). Unit EH conversion efficiency; the
/// equal-stage time split cancels.
double harvested_transmit_power(const MisoInstance& inst, const CVec& w1,
                                const CVec& w2, double beta);

struct RateTriple {
  double r1_bps = 0.0;
  double r2_bps = 0.0;
  double rsum_bps = 0.0;
};

/// Rates for the two-stage protocol: R_i = (1/2) B log2(1 + SINR_i).
/// The 1/2 pre-log reflects the two equal transmission stages.
RateTriple rates_from_sinr(double gamma1, double snr2, const SystemParams& params);

struct FeasibilityReport {
  bool feasible = false;
  double slack_sic = 0.0;    // (1-b)|h2w1|^2 - g1((1-b)|h2w2|^2 + 1)
  double slack_qos = 0.0;    // equivalent SINR - gamma1
  double slack_power = 0.0;  // 1 - |w1|^2 - |w2|^2
  double slack_beta = 0.0;   // min(beta, 1 - beta)
};

/// Evaluates the four joint-design constraints at a candidate point and
/// reports signed slacks; feasible iff every slack >= -tol.
/// Throws std::invalid_argument for beta outside [0, 1].
FeasibilityReport check_p1_feasibility(const MisoInstance& inst, const CVec& w1,
                                       const CVec& w2, double beta, double gamma1,
                                       double tol = 1e-6);

}  // namespace swiptnoma
