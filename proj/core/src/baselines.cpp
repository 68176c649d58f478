#include "swiptnoma/baselines.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "swiptnoma/conic.hpp"
#include "swiptnoma/miso.hpp"

namespace swiptnoma::baselines {

using conic::ConicStatus;
using conic::LinExpr;

double gamma_from_rate_two_stage(double rate_bps_hz) {
  return std::pow(2.0, 2.0 * rate_bps_hz) - 1.0;
}

double gamma_from_rate_single_slot(double rate_bps_hz) {
  return std::pow(2.0, rate_bps_hz) - 1.0;
}

BaselineResult noncoop_noma_miso(const MisoInstance& inst, double gamma_nc,
                                 double bandwidth_hz) {
  if (gamma_nc <= 0.0) throw std::invalid_argument("gamma_nc must be > 0");
  BaselineResult out;
  out.strategy = "noncoop-noma";

  const auto M = miso::SdrMatrices::from_instance(inst);
  conic::ConicProblem p;
  const int W1 = p.add_psd_variable_block(M.side, "W1");
  const int W2 = p.add_psd_variable_block(M.side, "W2");
  const LinExpr tr_h1w1 = p.trace_expr(M.H1_real_half, W1);
  const LinExpr tr_h1w2 = p.trace_expr(M.H1_real_half, W2);
  const LinExpr tr_h2w1 = p.trace_expr(M.H2_real_half, W1);
  const LinExpr tr_h2w2 = p.trace_expr(M.H2_real_half, W2);
  const Eigen::MatrixXd half_eye = 0.5 * Eigen::MatrixXd::Identity(M.side, M.side);

  p.set_objective(tr_h2w2);
  p.add_nonneg(tr_h1w1 - gamma_nc * tr_h1w2 - gamma_nc);  // user-1 QoS
  p.add_nonneg(tr_h2w1 - gamma_nc * tr_h2w2 - gamma_nc);  // SIC decodability
  p.add_nonneg(1.0 - p.trace_expr(half_eye, W1) - p.trace_expr(half_eye, W2));

  const auto sol = conic::solve(p);
  if (sol.status != ConicStatus::Optimal) return out;  // Infeasible propagated as such

  const CMat W2c = conic::recover_hermitian(p.psd_block_value(sol.x, W2, M.side));
  const CMat W1c = conic::recover_hermitian(p.psd_block_value(sol.x, W1, M.side));
  Eigen::SelfAdjointEigenSolver<CMat> e1(W1c), e2(W2c);
  const int n = inst.nt();
  const double l1a = e1.eigenvalues()(n - 1), l2a = e2.eigenvalues()(n - 1);
  const double l1b = n > 1 ? e1.eigenvalues()(n - 2) : 0.0;
  const double l2b = n > 1 ? e2.eigenvalues()(n - 2) : 0.0;
  const double r1 = l1b > 1e-14 * std::max(l1a, 1e-300) ? l1a / l1b
                                                        : std::numeric_limits<double>::infinity();
  const double r2 = l2b > 1e-14 * std::max(l2a, 1e-300) ? l2a / l2b
                                                        : std::numeric_limits<double>::infinity();
  out.eig_ratio = std::min(r1, r2);
  out.snr2 = sol.objective;
  out.feasible = true;
  out.r1_bps = bandwidth_hz * std::log2(1.0 + gamma_nc);
  out.r2_bps = bandwidth_hz * std::log2(1.0 + std::max(out.snr2, 0.0));
  out.rsum_bps = out.r1_bps + out.r2_bps;
  return out;
}

BaselineResult noncoop_noma_siso(const SisoInstance& inst, double gamma_nc,
                                 double bandwidth_hz) {
  if (gamma_nc <= 0.0) throw std::invalid_argument("gamma_nc must be > 0");
  BaselineResult out;
  out.strategy = "noncoop-noma";
  const double a1 = gamma_nc * (inst.h1 + 1.0) / ((gamma_nc + 1.0) * inst.h1);
  const double a2 = gamma_nc * (inst.h2 + 1.0) / ((gamma_nc + 1.0) * inst.h2);
  const double alpha = std::max(a1, a2);
  out.alpha = alpha;
  if (alpha > 1.0) return out;
  out.feasible = true;
  out.snr2 = (1.0 - alpha) * inst.h2;
  out.r1_bps = bandwidth_hz * std::log2(1.0 + gamma_nc);
  out.r2_bps = bandwidth_hz * std::log2(1.0 + out.snr2);
  out.rsum_bps = out.r1_bps + out.r2_bps;
  return out;
}

BaselineResult oma_dynamic(double gain1, double gain2, double rate_target_bps_hz,
                           double bandwidth_hz) {
  if (rate_target_bps_hz < 0.0) throw std::invalid_argument("target rate must be >= 0");
  BaselineResult out;
  out.strategy = "oma-dynamic";
  out.snr2 = gain2;
  const double r1_cap = std::log2(1.0 + gain1);
  const double tau1 = rate_target_bps_hz <= 0.0 ? 0.0 : rate_target_bps_hz / r1_cap;
  out.tau1 = tau1;
  if (!(tau1 <= 1.0)) return out;
  out.feasible = true;
  out.r1_bps = bandwidth_hz * rate_target_bps_hz;
  out.r2_bps = bandwidth_hz * (1.0 - tau1) * std::log2(1.0 + gain2);
  out.rsum_bps = out.r1_bps + out.r2_bps;
  return out;
}

BaselineResult oma_fixed(double gain1, double gain2, double rate_target_bps_hz,
                         double bandwidth_hz) {
  if (rate_target_bps_hz < 0.0) throw std::invalid_argument("target rate must be >= 0");
  BaselineResult out;
  out.strategy = "oma-fixed";
  out.snr2 = gain2;
  out.tau1 = 0.5;
  const double r1 = 0.5 * std::log2(1.0 + gain1);
  if (r1 < rate_target_bps_hz) return out;
  out.feasible = true;
  out.r1_bps = bandwidth_hz * r1;
  out.r2_bps = bandwidth_hz * 0.5 * std::log2(1.0 + gain2);
  out.rsum_bps = out.r1_bps + out.r2_bps;
  return out;
}

}  // namespace swiptnoma::baselines
