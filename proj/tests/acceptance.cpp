// Acceptance suite: end-to-end checks of the solver stack, one printed
// PASS/FAIL line per criterion. Exit code 0 only if every criterion holds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "swiptnoma/baselines.hpp"
#include "swiptnoma/channel.hpp"
#include "swiptnoma/conic.hpp"
#include "swiptnoma/harness.hpp"
#include "swiptnoma/miso.hpp"
#include "swiptnoma/siso.hpp"
#include "swiptnoma/system.hpp"

using namespace swiptnoma;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s -- %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

SystemParams sim_params(int nt, double ps_dbm) {
  SystemParams p;
  p.transmit_power_dbm = ps_dbm;
  p.noise_power_dbm = -90.0;
  p.noise_is_density = true;
  p.antenna_count_nt = nt;
  p.sinr_target_gamma1 = 1.0;
  return p;
}

std::vector<SisoInstance> feasible_siso(std::uint64_t seed0, int count, double ps_dbm) {
  std::vector<SisoInstance> out;
  for (std::uint64_t i = 0; static_cast<int>(out.size()) < count && i < 100000; ++i) {
    Rng rng(mix_seed(seed0, i));
    auto inst = sample_instance(rng, sim_params(1, ps_dbm)).instance.as_siso();
    if (siso::feasible_beta_interval(inst, 1.0).feasible) out.push_back(inst);
  }
  return out;
}

std::vector<MisoInstance> miso_batch(std::uint64_t seed0, int count, int nt,
                                     double ps_dbm) {
  std::vector<MisoInstance> out;
  for (std::uint64_t i = 0; static_cast<int>(out.size()) < count; ++i) {
    Rng rng(mix_seed(seed0, i));
    out.push_back(sample_instance(rng, sim_params(nt, ps_dbm)).instance);
  }
  return out;
}

template <typename F>
void parallel_for(int n, F&& body) {
  const int jobs = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  const int chunk = (n + jobs - 1) / jobs;
  std::vector<std::future<void>> futs;
  for (int lo = 0; lo < n; lo += chunk) {
    const int hi = std::min(n, lo + chunk);
    futs.push_back(std::async(std::launch::async, [lo, hi, &body] {
      for (int i = lo; i < hi; ++i) body(i);
    }));
  }
  for (auto& f : futs) f.get();
}

// --------------------------------------------------------------------------

void criterion1_and_2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto batch = feasible_siso(1001, 200, 30.0);
  const double gamma1 = 1.0;
  const int grid_n = 2001;
  const double step = 1.0 / (grid_n - 1);

  std::vector<int> fails(batch.size(), 0);
  std::vector<double> worst(batch.size(), 0.0);
  parallel_for(static_cast<int>(batch.size()), [&](int i) {
    const auto& inst = batch[static_cast<size_t>(i)];
    siso::GssOptions gopt;
    gopt.eps = 1e-9;  // boundary peaks can be razor sharp when h1 is tiny
    const auto gss = siso::gss_solve(inst, gamma1, gopt);
    const auto bf = siso::brute_force_siso(inst, gamma1, grid_n);
    if (gss.status != SolveStatus::Optimal || !bf.feasible) {
      fails[static_cast<size_t>(i)] = 1;
      return;
    }
    // lattice slack: |dh/dalpha| <= h2 exactly; beta sensitivity probed on
    // the feasibility interval
    const auto iv = siso::feasible_beta_interval(inst, gamma1);
    double slope = 0.0, prev = siso::evaluate_h(iv.beta_min, inst, gamma1);
    const int probes = 512;
    const double db = (iv.beta_max - iv.beta_min) / probes;
    for (int k = 1; k <= probes && db > 0.0; ++k) {
      const double h = siso::evaluate_h(iv.beta_min + k * db, inst, gamma1);
      if (std::isfinite(h) && std::isfinite(prev))
        slope = std::max(slope, std::abs(h - prev) / db);
      prev = h;
    }
    const double slack = inst.h2 * step + slope * step;
    const double tol = 1e-3 * std::max(gss.objective, bf.objective) + slack;
    const double diff = std::abs(gss.objective - bf.objective);
    worst[static_cast<size_t>(i)] = diff / std::max(1e-300, tol);
    if (diff > tol) fails[static_cast<size_t>(i)] = 1;
  });
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const int bad = std::accumulate(fails.begin(), fails.end(), 0);
  const double wmax = *std::max_element(worst.begin(), worst.end());
  report(1, "SISO global optimality vs 2001x2001 lattice",
         static_cast<int>(batch.size()) == 200 && bad == 0 && secs < 60.0,
         fmt("200 instances, %d mismatches; worst diff/tol %.3f; %.1f s (< 60 s)", bad,
             wmax, secs));

  // criterion 2: exact closed form plus the endpoint law
  const SisoInstance canned{1.0, 10.0, 2.0};
  const auto alpha = siso::optimal_alpha(0.5, canned, 1.0);
  const double h_val = siso::evaluate_h(0.5, canned, 1.0);
  bool ok = alpha.has_value() && std::abs(*alpha - 0.6) <= 1e-12 &&
            std::abs(h_val - 2.0) <= 1e-12;
  double worst_endpoint = 0.0;
  for (const auto& inst : batch) {
    const auto iv = siso::feasible_beta_interval(inst, 1.0);
    worst_endpoint =
        std::max(worst_endpoint, std::abs(siso::evaluate_h(iv.beta_max, inst, 1.0)));
  }
  ok = ok && worst_endpoint <= 1e-9;
  report(2, "closed-form power split and endpoint law", ok,
         fmt("alpha(0.5)=%.15g (expect 0.6), h=%.15g (expect 2.0); worst "
             "|h(beta_max)| = %.2e (<= 1e-9)",
             alpha.value_or(-1.0), h_val, worst_endpoint));
}

void criterion3() {
  Rng rng(33331);
  int tested = 0, fd_bad = 0, sign_bad = 0;
  double worst = 0.0;
  while (tested < 10000) {
    const SisoInstance inst{std::exp(0.7 * rng.normal()), 2.0 + 8.0 * rng.uniform(),
                            0.2 + 2.0 * rng.uniform()};
    const auto iv = siso::feasible_beta_interval(inst, 1.0);
    if (!iv.feasible) continue;
    const double cap = std::min(iv.beta_max, 1.0 / (inst.h2 * inst.g));
    if (cap <= iv.beta_min) continue;
    const double b = iv.beta_min + (cap - iv.beta_min) * rng.uniform();
    const double h = 3e-6;
    const double fd =
        (siso::f_of_beta(b + h, inst, 1.0) - siso::f_of_beta(b - h, inst, 1.0)) /
        (2.0 * h);
    const double an = siso::f_prime(b, inst, 1.0);
    const double err = std::abs(an - fd) / std::max(1.0, std::abs(fd));
    worst = std::max(worst, err);
    if (err > 1e-6) ++fd_bad;
    const double d = siso::delta_sign(b, inst, 1.0);
    if (std::abs(d) > 1e-9 && std::signbit(d) != std::signbit(an)) ++sign_bad;
    ++tested;
  }
  report(3, "derivative oracle vs finite differences", fd_bad == 0 && sign_bad == 0,
         fmt("10000 points: %d FD mismatches (worst %.2e, tol 1e-6), %d sign "
             "disagreements",
             fd_bad, worst, sign_bad));
}

void criterion4() {
  const auto insts = miso_batch(4001, 160, 1, 25.0);
  std::vector<int> status(insts.size(), 0);  // 0 skip, 1 ok, 2 agree-fail, 3 mono-fail
  std::vector<double> rel(insts.size(), 0.0);
  parallel_for(static_cast<int>(insts.size()), [&](int i) {
    const auto& inst = insts[static_cast<size_t>(i)];
    siso::GssOptions gopt;
    gopt.eps = 1e-9;  // boundary peaks can be razor sharp when h1 is tiny
    const auto gss = siso::gss_solve(inst.as_siso(), 1.0, gopt);
    if (gss.status != SolveStatus::Optimal) return;
    Rng ext(mix_seed(4100, static_cast<std::uint64_t>(i)));
    const auto sca = miso::sca_solve(inst, 1.0, ext);
    if (sca.status == SolveStatus::Infeasible) {
      status[static_cast<size_t>(i)] = 2;
      return;
    }
    const double diff = std::abs(sca.objective - gss.objective);
    const double tol = 1e-3 * std::max({1.0, sca.objective, gss.objective});
    rel[static_cast<size_t>(i)] = diff / tol;
    status[static_cast<size_t>(i)] = diff <= tol ? 1 : 2;
    for (size_t k = 1; k < sca.trace.size(); ++k) {
      const double u = sca.trace[k].surrogate_objective;
      const double up = sca.trace[k - 1].surrogate_objective;
      if (u < up - 1e-6 * std::max(1.0, std::abs(u)))
        status[static_cast<size_t>(i)] = 3;
    }
  });
  int ok = 0, agree_bad = 0, mono_bad = 0;
  double wrel = 0.0;
  for (size_t i = 0; i < insts.size(); ++i) {
    if (status[i] == 1) ++ok;
    if (status[i] == 2) ++agree_bad;
    if (status[i] == 3) ++mono_bad;
    wrel = std::max(wrel, rel[i]);
  }
  report(4, "SCA agrees with GSS at N_t=1 and iterates monotonically",
         ok >= 100 && agree_bad == 0 && mono_bad == 0,
         fmt("%d feasible comparisons (need >= 100), %d disagreements (worst diff/tol "
             "%.3f), %d monotonicity violations",
             ok, agree_bad, wrel, mono_bad));
}

struct C5Result {
  int compared = 0, low = 0, infeas = 0, rank_bad = 0;
  double gap_min = kInf, gap_max = -kInf, gap_sum = 0.0;
};

// The returned point being feasible for the relaxed joint problem certifies
// that any excess over the lattice value is lattice resolution, not an
// inflated answer.
bool sdr_point_feasible(const MisoInstance& inst, const MisoSolution& sol,
                        double gamma1, double tol) {
  const CMat H1 = inst.h1_vec * inst.h1_vec.adjoint();
  const CMat H2 = inst.h2_vec * inst.h2_vec.adjoint();
  const double t_h2w1 = (H2 * sol.W1).trace().real();
  const double t_h2w2 = (H2 * sol.W2).trace().real();
  const double t_h1w1 = (H1 * sol.W1).trace().real();
  const double t_h1w2 = (H1 * sol.W2).trace().real();
  const double b = sol.beta;
  if (b < -tol || b > 1.0 + tol) return false;
  const double dec = (1.0 - b) * t_h2w1 - gamma1 * ((1.0 - b) * t_h2w2 + 1.0);
  if (dec < -tol * std::max(1.0, (1.0 - b) * t_h2w1)) return false;
  const double qos = t_h1w1 / (t_h1w2 + 1.0) + b * inst.g * (t_h2w1 + t_h2w2) - gamma1;
  if (qos < -tol * std::max(1.0, gamma1)) return false;
  const double tr = sol.W1.trace().real() + sol.W2.trace().real();
  if (tr > 1.0 + tol) return false;
  for (const CMat* W : {&sol.W1, &sol.W2}) {
    Eigen::SelfAdjointEigenSolver<CMat> es(*W, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol * std::max(1.0, W->trace().real()))
      return false;
  }
  return true;
}

C5Result g_c5;

void criterion5_and_rank() {
  const auto insts = miso_batch(5001, 70, 2, 20.0);
  std::vector<double> sca_obj(insts.size(), -1.0), exh_obj(insts.size(), -1.0);
  std::vector<int> rank_bad(insts.size(), 0), cert_bad(insts.size(), 0);
  parallel_for(static_cast<int>(insts.size()), [&](int i) {
    const auto& inst = insts[static_cast<size_t>(i)];
    miso::ExhaustiveOptions eopt;  // 101 x 101 lattice
    const auto exh = miso::exhaustive_search(inst, 1.0, eopt);
    if (exh.status != SolveStatus::Optimal) return;
    Rng ext(mix_seed(5100, static_cast<std::uint64_t>(i)));
    const auto sca = miso::sca_solve(inst, 1.0, ext);
    if (sca.status == SolveStatus::Infeasible) return;
    exh_obj[static_cast<size_t>(i)] = exh.objective;
    sca_obj[static_cast<size_t>(i)] = sca.objective;
    if (!sdr_point_feasible(inst, sca, 1.0, 1e-6)) cert_bad[static_cast<size_t>(i)] = 1;
    Eigen::SelfAdjointEigenSolver<CMat> e1(exh.W1, Eigen::EigenvaluesOnly);
    const auto ev1 = e1.eigenvalues();
    if (ev1(ev1.size() - 2) > 1e-6 * std::max(ev1(ev1.size() - 1), 1e-300))
      rank_bad[static_cast<size_t>(i)] = 1;
    if (exh.W2.trace().real() > 1e-9 * exh.W1.trace().real()) {
      Eigen::SelfAdjointEigenSolver<CMat> e2(exh.W2, Eigen::EigenvaluesOnly);
      const auto ev2 = e2.eigenvalues();
      if (ev2(ev2.size() - 2) > 1e-6 * std::max(ev2(ev2.size() - 1), 1e-300))
        rank_bad[static_cast<size_t>(i)] = 1;
    }
  });
  C5Result r;
  for (size_t i = 0; i < insts.size() && r.compared < 50; ++i) {
    if (exh_obj[i] < 0.0 || sca_obj[i] < 0.0) continue;
    ++r.compared;
    const double gap = sca_obj[i] / exh_obj[i] - 1.0;
    r.gap_min = std::min(r.gap_min, gap);
    r.gap_max = std::max(r.gap_max, gap);
    r.gap_sum += gap;
    if (sca_obj[i] < 0.98 * exh_obj[i]) ++r.low;
    // any excess over the lattice value must come from lattice resolution,
    // certified by feasibility of the returned point
    r.infeas += cert_bad[i];
    r.rank_bad += rank_bad[i];
  }
  g_c5 = r;
  report(5, "SCA within 2% of the 101x101 exhaustive lattice at N_t=2",
         r.compared >= 50 && r.low == 0 && r.infeas == 0,
         fmt("%d feasible comparisons (need >= 50): %d below 0.98x, %d uncertified "
             "points; gap in [%.4f, %.4f], mean %.4f",
             r.compared, r.low, r.infeas, r.gap_min, r.gap_max,
             r.gap_sum / std::max(1, r.compared)));
}

void criterion6() {
  int converged = 0, strong = 0;
  for (int nt : {2, 3, 4}) {
    const auto insts =
        miso_batch(6000 + static_cast<std::uint64_t>(nt), 180, nt, 25.0);
    std::vector<int> flag(insts.size(), -1);
    parallel_for(static_cast<int>(insts.size()), [&](int i) {
      Rng ext(mix_seed(6100 + static_cast<std::uint64_t>(nt),
                       static_cast<std::uint64_t>(i)));
      const auto sca = miso::sca_solve(insts[static_cast<size_t>(i)], 1.0, ext);
      if (sca.status != SolveStatus::Stationary) return;
      flag[static_cast<size_t>(i)] = sca.eig_ratio_lambda >= 1e6 ? 1 : 0;
    });
    for (int f : flag) {
      if (f >= 0) ++converged;
      if (f == 1) ++strong;
    }
  }
  const double frac = converged ? static_cast<double>(strong) / converged : 0.0;
  report(6, "rank-one certificates",
         converged >= 500 && frac >= 0.99 && g_c5.rank_bad == 0,
         fmt("%d converged runs across N_t in {2,3,4}; R_lambda >= 1e6 for %.2f%% "
             "(need 99%%); %d lattice optima with lambda2/lambda1 > 1e-6",
             converged, 100.0 * frac, g_c5.rank_bad));
}

void criterion7() {
  using namespace conic;
  bool micro_ok = true;
  std::string micro;
  {
    ConicProblem p;
    const int x = p.add_variable("x");
    p.set_objective(LinExpr::var(x));
    p.add_nonneg(LinExpr::var(x));
    p.add_nonneg(1.0 - LinExpr::var(x));
    const auto s = solve(p, {1e-9, 200});
    const double err = std::abs(s.x(x) - 1.0);
    micro_ok = micro_ok && s.status == ConicStatus::Optimal && err <= 1e-8;
    micro += fmt("LP err %.1e; ", err);
  }
  {
    ConicProblem p;
    const int X = p.add_psd_variable_block(2, "X");
    Eigen::MatrixXd C(2, 2);
    C << 2, 0, 0, 1;
    p.set_objective(p.trace_expr(C, X));
    p.add_equality(p.trace_expr(Eigen::MatrixXd::Identity(2, 2), X), 1.0);
    const auto s = solve(p, {1e-9, 200});
    const double err = std::abs(s.objective - 2.0);
    micro_ok = micro_ok && s.status == ConicStatus::Optimal && err <= 1e-8;
    micro += fmt("max-eig err %.1e; ", err);
  }
  {
    ConicProblem p;
    const int v = p.add_variable("v");
    p.set_objective(LinExpr::var(v));
    p.add_schur_2x2(LinExpr(4.0), LinExpr(9.0), LinExpr::var(v));
    const auto s = solve(p, {1e-9, 200});
    const double err = std::abs(s.x(v) - 6.0);
    micro_ok = micro_ok && s.status == ConicStatus::Optimal && err <= 1e-8;
    micro += fmt("geo-mean err %.1e", err);
  }

  // residual audit over a matrix of subproblems from the model family
  const auto insts = miso_batch(7001, 60, 2, 20.0);
  std::vector<double> worst(insts.size(), 0.0);
  std::vector<int> optimal(insts.size(), 0);
  parallel_for(static_cast<int>(insts.size()), [&](int i) {
    const auto& inst = insts[static_cast<size_t>(i)];
    Rng r(mix_seed(7100, static_cast<std::uint64_t>(i)));
    for (int k = 0; k < 4; ++k) {
      const double beta = 0.05 + 0.85 * r.uniform();
      const double x = r.uniform();
      auto pt = miso::solve_sdr(miso::build_p3(inst, beta, x, 1.0), inst, beta);
      if (pt.status == ConicStatus::Optimal) {
        ++optimal[static_cast<size_t>(i)];
        worst[static_cast<size_t>(i)] =
            std::max(worst[static_cast<size_t>(i)], pt.residuals.max());
      }
      auto p5 = miso::solve_sdr(miso::build_p5(inst, 1.0, 0.5 + r.uniform(),
                                               0.5 + r.uniform(), 0.5 + r.uniform()),
                                inst, 0.0);
      if (p5.status == ConicStatus::Optimal) {
        ++optimal[static_cast<size_t>(i)];
        worst[static_cast<size_t>(i)] =
            std::max(worst[static_cast<size_t>(i)], p5.residuals.max());
      }
    }
  });
  double wmax = 0.0;
  int nopt = 0;
  for (size_t i = 0; i < insts.size(); ++i) {
    wmax = std::max(wmax, worst[i]);
    nopt += optimal[i];
  }
  report(7, "conic solver soundness", micro_ok && wmax <= 1e-7,
         fmt("%s; %d Optimal subproblem solves, worst KKT residual %.2e (<= 1e-7)",
             micro.c_str(), nopt, wmax));
}

void criterion8() {
  using namespace harness;
  const int trials = 200;

  // (a) + (d): power sweep with all strategies at the common figure target
  ExperimentConfig cfg;
  cfg.params = sim_params(2, 30.0);
  cfg.strategies = {Strategy::CoopSca, Strategy::NoncoopNoma, Strategy::OmaDynamic,
                    Strategy::OmaFixed};
  cfg.variable = SweepVariable::TransmitPowerDbm;
  cfg.grid = {10, 15, 20, 25, 30, 35, 40};
  cfg.trials = trials;
  cfg.master_seed = 8801;
  auto res = run_sweep(cfg);
  std::map<std::pair<std::string, double>, PointSummary> sum;
  for (const auto& s : res.summary) sum[{s.strategy, s.sweep_value}] = s;

  bool a_ok = true, d_ok = true;
  double gap35 = 0.0, gap40 = 0.0;
  double nc_all = 0.0, dyn_all = 0.0, fix_all = 0.0;
  for (double ps : cfg.grid) {
    const double coop = sum[{"coop-sca", ps}].mean_rsum_bps;
    const double nc = sum[{"noncoop-noma", ps}].mean_rsum_bps;
    const double dyn = sum[{"oma-dynamic", ps}].mean_rsum_bps;
    const double fix = sum[{"oma-fixed", ps}].mean_rsum_bps;
    // frame normalization: the single-slot protocol idles the relay stage;
    // slack covers stationary-solver noise on tied instances
    const double gap = coop - 0.5 * nc;
    if (gap < -1e-5 * std::max(1.0, coop)) a_ok = false;
    if (ps == 35.0) gap35 = gap;
    if (ps == 40.0) gap40 = gap;
    nc_all += nc;
    dyn_all += dyn;
    fix_all += fix;
    if (ps >= 35.0 && !(nc >= dyn - 1e-9 && dyn >= fix - 1e-9)) d_ok = false;
  }
  if (gap40 > gap35 + 1e-5 * std::max(1.0, std::abs(gap35))) a_ok = false;
  if (!(nc_all >= dyn_all && dyn_all >= fix_all)) d_ok = false;

  // (b): feasibility probability vs transmit power
  ExperimentConfig fcfg = cfg;
  fcfg.strategies = {Strategy::CoopSca};
  fcfg.grid = {0, 5, 10, 15, 20, 25, 30};
  fcfg.master_seed = 8801;  // common random numbers across points
  auto fres = run_sweep(fcfg);
  bool b_ok = true;
  {
    std::map<double, double> feas;
    for (const auto& s : fres.summary) feas[s.sweep_value] = s.feasibility;
    double prev = -1.0;
    for (const auto& [ps, f] : feas) {
      if (f < prev - 1e-12) b_ok = false;
      prev = f;
    }
  }

  // (c) + the 90%-level ordering on the target-rate sweep
  ExperimentConfig rcfg;
  rcfg.params = sim_params(2, 25.0);
  rcfg.strategies = {Strategy::CoopSca, Strategy::NoncoopNoma};
  rcfg.variable = SweepVariable::TargetRateBpsHz;
  rcfg.grid = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  rcfg.trials = trials;
  rcfg.master_seed = 8803;
  auto rres = run_sweep(rcfg);
  std::map<std::string, std::map<double, PointSummary>> by;
  for (const auto& s : rres.summary) by[s.strategy][s.sweep_value] = s;
  std::map<std::string, std::map<double, double>> r2mean;
  for (const auto& rec : rres.records)
    r2mean[rec.strategy][rec.sweep_value] += rec.r2_bps / trials;
  bool c_ok = true;
  {
    double prev_r2 = kInf;
    for (double g : rcfg.grid) {
      const double v = r2mean["coop-sca"][g];
      if (v > prev_r2 + 1e-6 * std::max(1.0, prev_r2)) c_ok = false;
      prev_r2 = v;
    }
  }
  auto level90 = [&](const std::string& strat) {
    double best = 0.0;
    for (double g : rcfg.grid)
      if (by[strat][g].feasibility >= 0.9) best = std::max(best, g);
    return best;
  };
  const double coop90 = level90("coop-sca");
  const double nc90 = level90("noncoop-noma");
  const bool head_ok = coop90 > nc90;

  report(8, "seeded trend reproduction", a_ok && b_ok && c_ok && d_ok && head_ok,
         fmt("(a) coop >= noncoop per frame at every power %s, gap 35->40 dBm %.3g -> "
             "%.3g %s; (b) feasibility monotone %s; (c) R2 nonincreasing %s; (d) NOMA "
             ">= OMA-dyn >= OMA-fixed %s; 90%% level coop %.2f > noncoop %.2f b/s/Hz "
             "%s",
             a_ok ? "yes" : "NO", gap35, gap40, gap40 <= gap35 + 1e-5 * std::max(1.0, std::abs(gap35)) ? "ok" : "NO",
             b_ok ? "yes" : "NO", c_ok ? "yes" : "NO", d_ok ? "yes" : "NO", coop90,
             nc90, head_ok ? "ok" : "NO"));
}

void criterion9() {
  using namespace harness;
  ExperimentConfig cfg;
  cfg.params = sim_params(2, 20.0);
  cfg.strategies = {Strategy::CoopSca, Strategy::NoncoopNoma, Strategy::OmaDynamic,
                    Strategy::OmaFixed};
  cfg.variable = SweepVariable::TransmitPowerDbm;
  cfg.grid = {15, 25};
  cfg.trials = 3;
  cfg.master_seed = 99;
  auto csv = [&](int jobs) {
    cfg.jobs = jobs;
    auto r = run_sweep(cfg);
    std::ostringstream os;
    write_csv(os, r.records, false);
    return os.str();
  };
  const std::string a = csv(1), b = csv(1), c = csv(4);
  report(9, "byte-identical reruns", a == b && a == c,
         fmt("re-run identical: %s; thread-count invariant: %s", a == b ? "yes" : "NO",
             a == c ? "yes" : "NO"));
}

}  // namespace

int main() {
  std::printf("acceptance suite (%u hardware threads)\n",
              std::thread::hardware_concurrency());
  criterion1_and_2();
  criterion3();
  criterion4();
  criterion5_and_rank();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
