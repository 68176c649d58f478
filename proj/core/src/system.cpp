#include "swiptnoma/system.hpp"

#include <cmath>
#include <stdexcept>

namespace swiptnoma {

namespace {

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

void require_same_dim(const MisoInstance& inst, const CVec& w1, const CVec& w2) {
  if (w1.size() != inst.h1_vec.size() || w2.size() != inst.h1_vec.size() ||
      inst.h2_vec.size() != inst.h1_vec.size()) {
    throw std::invalid_argument("beamformer/channel dimension mismatch");
  }
}

double abs2(const std::complex<double>& c) { return std::norm(c); }

}  // namespace

void SystemParams::validate() const {
  if (sinr_target_gamma1 <= 0.0) throw std::invalid_argument("gamma1 must be > 0");
  if (antenna_count_nt < 1) throw std::invalid_argument("antenna count must be >= 1");
  if (stage_fraction_tau <= 0.0 || stage_fraction_tau >= 1.0)
    throw std::invalid_argument("stage fraction must lie in (0,1)");
  if (bandwidth_hz <= 0.0) throw std::invalid_argument("bandwidth must be > 0");
  if (rician_k < 0.0) throw std::invalid_argument("Rician K must be >= 0");
}

double SystemParams::transmit_power_mw() const { return dbm_to_mw(transmit_power_dbm); }

double SystemParams::noise_power_mw() const {
  double dbm = noise_power_dbm;
  if (noise_is_density) dbm += 10.0 * std::log10(bandwidth_hz);
  return dbm_to_mw(dbm);
}

SisoInstance SisoInstance::checked(double h1, double h2, double g) {
  if (!(h1 > 0.0) || !(h2 > 0.0) || !(g > 0.0))
    throw std::invalid_argument("SISO channel gains must be > 0");
  return SisoInstance{h1, h2, g};
}

SisoInstance MisoInstance::as_siso() const {
  if (nt() != 1) throw std::invalid_argument("as_siso requires N_t == 1");
  return SisoInstance{abs2(h1_vec(0)), abs2(h2_vec(0)), g};
}

MisoInstance MisoInstance::checked(CVec h1, CVec h2, double g) {
  if (h1.size() != h2.size() || h1.size() < 1)
    throw std::invalid_argument("channel vectors must share a positive length");
  if (!(h1.norm() > 0.0) || !(h2.norm() > 0.0))
    throw std::invalid_argument("channel vectors must have nonzero norm");
  if (g < 0.0) throw std::invalid_argument("relay gain must be >= 0");
  return MisoInstance{std::move(h1), std::move(h2), g};
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Stationary: return "Stationary";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::MaxIter: return "MaxIter";
  }
  return "?";
}

double sinr_stage1_user1(const MisoInstance& inst, const CVec& w1, const CVec& w2) {
  require_same_dim(inst, w1, w2);
  const double sig = abs2(inst.h1_vec.dot(w1));
  const double intf = abs2(inst.h1_vec.dot(w2));
  return sig / (intf + 1.0);
}

double equivalent_sinr_user1(const MisoInstance& inst, const CVec& w1,
                             const CVec& w2, double beta) {
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("beta must lie in [0,1]");
  const double relay = inst.g * (abs2(inst.h2_vec.dot(w1)) + abs2(inst.h2_vec.dot(w2)));
  return sinr_stage1_user1(inst, w1, w2) + beta * relay;
}

double harvested_transmit_power(const MisoInstance& inst, const CVec& w1,
                                const CVec& w2, double beta) {
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("beta must lie in [0,1]");
  require_same_dim(inst, w1, w2);
  return beta * (abs2(inst.h2_vec.dot(w1)) + abs2(inst.h2_vec.dot(w2)));
}

RateTriple rates_from_sinr(double gamma1, double snr2, const SystemParams& params) {
  if (gamma1 < 0.0 || snr2 < 0.0) throw std::invalid_argument("SINR inputs must be >= 0");
  RateTriple r;
  const double half_b = 0.5 * params.bandwidth_hz;
  r.r1_bps = half_b * std::log2(1.0 + gamma1);
  r.r2_bps = half_b * std::log2(1.0 + snr2);
  r.rsum_bps = r.r1_bps + r.r2_bps;
  return r;
}

FeasibilityReport check_p1_feasibility(const MisoInstance& inst, const CVec& w1,
                                       const CVec& w2, double beta, double gamma1,
                                       double tol) {
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("beta out of range [0,1]");
  require_same_dim(inst, w1, w2);

  FeasibilityReport rep;
  const double h2w1 = abs2(inst.h2_vec.dot(w1));
  const double h2w2 = abs2(inst.h2_vec.dot(w2));
  rep.slack_sic = (1.0 - beta) * h2w1 - gamma1 * ((1.0 - beta) * h2w2 + 1.0);
  rep.slack_qos = equivalent_sinr_user1(inst, w1, w2, beta) - gamma1;
  rep.slack_power = 1.0 - w1.squaredNorm() - w2.squaredNorm();
  rep.slack_beta = std::min(beta, 1.0 - beta);
  rep.feasible = rep.slack_sic >= -tol && rep.slack_qos >= -tol &&
                 rep.slack_power >= -tol && rep.slack_beta >= -tol;
  return rep;
}

}  // namespace swiptnoma
