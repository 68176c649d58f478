#pragma once

#include <string>

#include "swiptnoma/system.hpp"

namespace swiptnoma::baselines {

/// Comparison strategies. NOMA baselines run in a single slot and use the
/// full pre-log; the OMA baselines split one slot budget between the users.
struct BaselineResult {
  std::string strategy;
  double r1_bps = 0.0;
  double r2_bps = 0.0;
  double rsum_bps = 0.0;
  bool feasible = false;
  // internals for diagnostics
  double alpha = 0.0;       // SISO power split
  double tau1 = 0.0;        // OMA time share of user 1
  double snr2 = 0.0;        // user-2 linear SNR (NOMA) or gain (OMA)
  double eig_ratio = 0.0;   // SDR rank certificate (MISO only)
};

/// Target-rate mappings: the cooperative protocol spends two stages per
/// frame, single-slot NOMA spends one.
double gamma_from_rate_two_stage(double rate_bps_hz);
double gamma_from_rate_single_slot(double rate_bps_hz);

/// Single-slot NOMA via SDR: max |h2^H w2|^2 subject to the user-1 QoS and
/// the SIC decodability constraint at user 2, under the unit power cap.
BaselineResult noncoop_noma_miso(const MisoInstance& inst, double gamma_nc,
                                 double bandwidth_hz = 1.0);

/// Scalar closed form: alpha* = max_i gamma (h_i + 1) / ((gamma + 1) h_i),
/// feasible iff alpha* <= 1.
BaselineResult noncoop_noma_siso(const SisoInstance& inst, double gamma_nc,
                                 double bandwidth_hz = 1.0);

/// TDMA with the user-1 slot sized to exactly deliver the target rate.
/// g1, g2 are matched-filter gains (|h_i| norms squared in MISO).
BaselineResult oma_dynamic(double gain1, double gain2, double rate_target_bps_hz,
                           double bandwidth_hz = 1.0);

/// TDMA with an even 1/2 - 1/2 split.
BaselineResult oma_fixed(double gain1, double gain2, double rate_target_bps_hz,
                         double bandwidth_hz = 1.0);

}  // namespace swiptnoma::baselines
