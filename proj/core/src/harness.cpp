#include "swiptnoma/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace swiptnoma::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

const char* strategy_id(Strategy s) {
  switch (s) {
    case Strategy::CoopSca: return "coop-sca";
    case Strategy::CoopGss: return "coop-gss";
    case Strategy::CoopExhaustive: return "coop-exhaustive";
    case Strategy::NoncoopNoma: return "noncoop-noma";
    case Strategy::OmaDynamic: return "oma-dynamic";
    case Strategy::OmaFixed: return "oma-fixed";
  }
  return "?";
}

Strategy strategy_from_id(const std::string& id) {
  for (Strategy s : {Strategy::CoopSca, Strategy::CoopGss, Strategy::CoopExhaustive,
                     Strategy::NoncoopNoma, Strategy::OmaDynamic, Strategy::OmaFixed})
    if (id == strategy_id(s)) return s;
  throw std::invalid_argument("unknown strategy id: " + id);
}

const char* sweep_variable_id(SweepVariable v) {
  switch (v) {
    case SweepVariable::TransmitPowerDbm: return "transmit_power_dbm";
    case SweepVariable::TargetRateBpsHz: return "target_rate_bps_hz";
    case SweepVariable::AntennaCount: return "antenna_count";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (grid.empty()) throw std::invalid_argument("sweep grid must be nonempty");
  if (strategies.empty()) throw std::invalid_argument("strategy list must be nonempty");
  params.validate();
  const bool gss_listed =
      std::find(strategies.begin(), strategies.end(), Strategy::CoopGss) !=
      strategies.end();
  if (gss_listed && params.antenna_count_nt != 1 &&
      variable != SweepVariable::AntennaCount)
    throw std::invalid_argument("coop-gss requires a single transmit antenna");
}

namespace {

struct PointSetup {
  SystemParams params;
  double gamma_coop = 1.0;
  double gamma_noncoop = 1.0;
  double rate_target = 0.5;  // bits/s/Hz for the OMA baselines
};

PointSetup make_point_setup(const ExperimentConfig& cfg, double value) {
  PointSetup ps;
  ps.params = cfg.params;
  double rate = cfg.target_rate_bps_hz;
  switch (cfg.variable) {
    case SweepVariable::TransmitPowerDbm:
      ps.params.transmit_power_dbm = value;
      break;
    case SweepVariable::TargetRateBpsHz:
      rate = value;
      break;
    case SweepVariable::AntennaCount:
      ps.params.antenna_count_nt = static_cast<int>(value + 0.5);
      break;
  }
  if (cfg.map_gamma_from_rate || cfg.variable == SweepVariable::TargetRateBpsHz) {
    ps.gamma_coop = baselines::gamma_from_rate_two_stage(rate);
    ps.gamma_noncoop = baselines::gamma_from_rate_single_slot(rate);
    ps.rate_target = rate;
  } else {
    ps.gamma_coop = ps.params.sinr_target_gamma1;
    ps.gamma_noncoop = ps.params.sinr_target_gamma1;
    ps.rate_target = 0.5 * std::log2(1.0 + ps.gamma_coop);
  }
  ps.params.sinr_target_gamma1 = ps.gamma_coop;
  return ps;
}

SweepRecord evaluate_strategy(const ExperimentConfig& cfg, Strategy strat,
                              const PointSetup& ps, const MisoInstance& inst,
                              std::uint64_t seed) {
  SweepRecord rec;
  rec.strategy = std::string(strategy_id(strat)) + cfg.label_suffix;
  rec.seed = seed;
  const double bw = ps.params.bandwidth_hz;
  const auto t0 = std::chrono::steady_clock::now();
  switch (strat) {
    case Strategy::CoopSca: {
      Rng ext(mix_seed(seed, 0xE7));
      auto sol = miso::sca_solve(inst, ps.gamma_coop, ext, cfg.sca);
      rec.iterations = sol.iterations;
      rec.eig_ratio = sol.eig_ratio_lambda;
      if (sol.status == SolveStatus::Stationary || sol.status == SolveStatus::MaxIter) {
        rec.feasible = true;
        auto r = rates_from_sinr(ps.gamma_coop, std::max(sol.objective, 0.0), ps.params);
        rec.r1_bps = r.r1_bps;
        rec.r2_bps = r.r2_bps;
        rec.rsum_bps = r.rsum_bps;
      }
      break;
    }
    case Strategy::CoopGss: {
      auto sol = siso::gss_solve(inst.as_siso(), ps.gamma_coop, cfg.gss);
      rec.iterations = sol.iterations;
      rec.eig_ratio = kInf;
      if (sol.status == SolveStatus::Optimal) {
        rec.feasible = true;
        auto r = rates_from_sinr(ps.gamma_coop, std::max(sol.objective, 0.0), ps.params);
        rec.r1_bps = r.r1_bps;
        rec.r2_bps = r.r2_bps;
        rec.rsum_bps = r.rsum_bps;
      }
      break;
    }
    case Strategy::CoopExhaustive: {
      auto sol = miso::exhaustive_search(inst, ps.gamma_coop, cfg.exhaustive);
      rec.iterations = sol.iterations;
      rec.eig_ratio = sol.eig_ratio_lambda;
      if (sol.status == SolveStatus::Optimal) {
        rec.feasible = true;
        auto r = rates_from_sinr(ps.gamma_coop, std::max(sol.objective, 0.0), ps.params);
        rec.r1_bps = r.r1_bps;
        rec.r2_bps = r.r2_bps;
        rec.rsum_bps = r.rsum_bps;
      }
      break;
    }
    case Strategy::NoncoopNoma: {
      baselines::BaselineResult res =
          inst.nt() == 1
              ? baselines::noncoop_noma_siso(inst.as_siso(), ps.gamma_noncoop, bw)
              : baselines::noncoop_noma_miso(inst, ps.gamma_noncoop, bw);
      rec.feasible = res.feasible;
      rec.eig_ratio = res.eig_ratio;
      if (res.feasible) {
        rec.r1_bps = res.r1_bps;
        rec.r2_bps = res.r2_bps;
        rec.rsum_bps = res.rsum_bps;
      }
      break;
    }
    case Strategy::OmaDynamic:
    case Strategy::OmaFixed: {
      const double g1 = inst.h1_vec.squaredNorm();
      const double g2 = inst.h2_vec.squaredNorm();
      auto res = strat == Strategy::OmaDynamic
                     ? baselines::oma_dynamic(g1, g2, ps.rate_target, bw)
                     : baselines::oma_fixed(g1, g2, ps.rate_target, bw);
      rec.feasible = res.feasible;
      if (res.feasible) {
        rec.r1_bps = res.r1_bps;
        rec.r2_bps = res.r2_bps;
        rec.rsum_bps = res.rsum_bps;
      }
      break;
    }
  }
  rec.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  SweepResult result;

  const int jobs = cfg.jobs > 0
                       ? cfg.jobs
                       : std::max(1u, std::thread::hardware_concurrency());
  for (size_t pi = 0; pi < cfg.grid.size(); ++pi) {
    const PointSetup ps = make_point_setup(cfg, cfg.grid[pi]);
    auto run_range = [&](int t_begin, int t_end) {
      std::vector<SweepRecord> local;
      for (int trial = t_begin; trial < t_end; ++trial) {
        const std::uint64_t seed = mix_seed(cfg.master_seed, trial);
        Rng rng(seed);
        SampledInstance si = sample_instance(rng, ps.params, cfg.geometry);
        for (Strategy strat : cfg.strategies) {
          SweepRecord rec;
          try {
            rec = evaluate_strategy(cfg, strat, ps, si.instance, seed);
          } catch (const std::exception&) {
            // solver failure: recorded infeasible with iterations = -1, sweep continues
            rec.strategy = std::string(strategy_id(strat)) + cfg.label_suffix;
            rec.seed = seed;
            rec.iterations = -1;
          }
          rec.sweep_value = cfg.grid[pi];
          rec.trial = trial;
          local.push_back(std::move(rec));
        }
      }
      return local;
    };

    if (jobs == 1 || cfg.trials == 1) {
      auto recs = run_range(0, cfg.trials);
      result.records.insert(result.records.end(), recs.begin(), recs.end());
    } else {
      const int chunk = (cfg.trials + jobs - 1) / jobs;
      std::vector<std::future<std::vector<SweepRecord>>> futures;
      for (int t = 0; t < cfg.trials; t += chunk)
        futures.push_back(std::async(std::launch::async, run_range, t,
                                     std::min(cfg.trials, t + chunk)));
      for (auto& f : futures) {
        auto recs = f.get();
        result.records.insert(result.records.end(), recs.begin(), recs.end());
      }
    }
  }

  std::sort(result.records.begin(), result.records.end(),
            [](const SweepRecord& a, const SweepRecord& b) {
              return std::tie(a.strategy, a.sweep_value, a.trial) <
                     std::tie(b.strategy, b.sweep_value, b.trial);
            });

  std::map<std::pair<std::string, double>, PointSummary> acc;
  for (const auto& r : result.records) {
    auto& s = acc[{r.strategy, r.sweep_value}];
    s.strategy = r.strategy;
    s.sweep_value = r.sweep_value;
    s.mean_rsum_bps += r.rsum_bps;
    s.feasibility += r.feasible ? 1.0 : 0.0;
    s.trials += 1;
  }
  for (auto& [key, s] : acc) {
    s.mean_rsum_bps /= s.trials;
    s.feasibility /= s.trials;
    result.summary.push_back(s);
  }
  return result;
}

std::string csv_header(bool timing) {
  std::string h =
      "strategy,sweep_value,trial,seed,r1_bps,r2_bps,rsum_bps,feasible,iterations,"
      "eig_ratio";
  if (timing) h += ",wall_time_ms";
  return h;
}

void write_csv(std::ostream& os, const std::vector<SweepRecord>& records, bool timing) {
  os << csv_header(timing) << "\n";
  for (const auto& r : records) {
    os << r.strategy << ',' << format_double(r.sweep_value) << ',' << r.trial << ','
       << r.seed << ',' << format_double(r.r1_bps) << ',' << format_double(r.r2_bps)
       << ',' << format_double(r.rsum_bps) << ',' << (r.feasible ? 1 : 0) << ','
       << r.iterations << ',' << format_double(r.eig_ratio);
    if (timing) os << ',' << format_double(r.wall_time_ms);
    os << "\n";
  }
}

void write_summary(std::ostream& os, const std::vector<PointSummary>& summary) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-24s %14s %16s %12s %8s", "strategy", "sweep_value",
                "mean_rsum_bps", "feasibility", "trials");
  os << buf << "\n";
  for (const auto& s : summary) {
    std::snprintf(buf, sizeof(buf), "%-24s %14g %16.6g %12.3f %8d", s.strategy.c_str(),
                  s.sweep_value, s.mean_rsum_bps, s.feasibility, s.trials);
    os << buf << "\n";
  }
}

namespace {

SystemParams paper_setup_params() {
  SystemParams p;
  p.transmit_power_dbm = 30.0;
  p.noise_power_dbm = -90.0;
  p.noise_is_density = true;  // -90 dBm/Hz density over the 1 MHz band
  p.sinr_target_gamma1 = 1.0;
  p.antenna_count_nt = 2;
  p.rician_k = 3.0;
  p.pathloss_exp_user1 = 4.0;
  p.pathloss_exp_user2 = 2.0;
  p.bandwidth_hz = 1e6;
  return p;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

}  // namespace

std::vector<std::string> figure_ids() {
  return {"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"};
}

std::vector<FigurePreset> figure_presets(const std::string& id) {
  ExperimentConfig base;
  base.params = paper_setup_params();
  base.trials = 200;
  base.exhaustive.grid_beta = 41;
  base.exhaustive.grid_x = 41;

  if (id == "fig3") {
    base.strategies = {Strategy::CoopSca, Strategy::CoopExhaustive,
                       Strategy::NoncoopNoma, Strategy::OmaDynamic, Strategy::OmaFixed};
    base.variable = SweepVariable::TransmitPowerDbm;
    base.grid = {10, 15, 20, 25, 30, 35, 40};
    return {{id, "sum rate vs transmit power, two antennas", base}};
  }
  if (id == "fig4") {
    base.params.antenna_count_nt = 1;
    base.strategies = {Strategy::CoopGss, Strategy::NoncoopNoma, Strategy::OmaDynamic,
                       Strategy::OmaFixed};
    base.variable = SweepVariable::TransmitPowerDbm;
    base.grid = {10, 15, 20, 25, 30, 35, 40};
    return {{id, "sum rate vs transmit power, single antenna", base}};
  }
  if (id == "fig5") {
    ExperimentConfig miso = base;
    miso.strategies = {Strategy::CoopSca, Strategy::CoopExhaustive};
    miso.variable = SweepVariable::TransmitPowerDbm;
    miso.grid = {0, 5, 10, 15, 20, 25, 30};
    ExperimentConfig siso = miso;
    siso.params.antenna_count_nt = 1;
    siso.strategies = {Strategy::CoopSca, Strategy::CoopGss};
    siso.label_suffix = "-siso";
    return {{id, "feasibility probability vs transmit power (two antennas)", miso},
            {id, "feasibility probability vs transmit power (single antenna)", siso}};
  }
  if (id == "fig6") {
    ExperimentConfig p35 = base;
    p35.strategies = {Strategy::CoopSca, Strategy::NoncoopNoma};
    p35.variable = SweepVariable::TargetRateBpsHz;
    p35.grid = linspace(0.25, 3.0, 12);
    p35.params.transmit_power_dbm = 35.0;
    p35.label_suffix = "-ps35";
    ExperimentConfig p40 = p35;
    p40.params.transmit_power_dbm = 40.0;
    p40.label_suffix = "-ps40";
    return {{id, "user-2 rate vs user-1 target rate at 35 dBm", p35},
            {id, "user-2 rate vs user-1 target rate at 40 dBm", p40}};
  }
  if (id == "fig7") {
    return {};  // per-iteration convergence trace, see run_convergence_trace
  }
  if (id == "fig8") {
    base.strategies = {Strategy::CoopSca, Strategy::NoncoopNoma, Strategy::OmaDynamic,
                       Strategy::OmaFixed};
    base.variable = SweepVariable::TargetRateBpsHz;
    base.grid = linspace(0.25, 4.0, 16);
    base.params.transmit_power_dbm = 25.0;
    return {{id, "feasibility probability vs user-1 target rate at 25 dBm", base}};
  }
  if (id == "fig9") {
    base.strategies = {Strategy::CoopSca};
    base.variable = SweepVariable::AntennaCount;
    base.grid = {2, 3, 4};
    return {{id, "rank-one eigenvalue ratio vs antenna count", base}};
  }
  throw std::invalid_argument("unknown figure id: " + id);
}

std::vector<TraceRow> run_convergence_trace(const SystemParams& params,
                                            const GeometryConfig& geometry,
                                            std::uint64_t seed) {
  SystemParams p = params;
  p.antenna_count_nt = 1;
  Rng rng(seed);
  SampledInstance si = sample_instance(rng, p, geometry);
  const double gamma1 = p.sinr_target_gamma1;

  std::vector<TraceRow> rows;
  auto gss = siso::gss_solve(si.instance.as_siso(), gamma1);
  for (size_t i = 0; i < gss.objective_trace.size(); ++i) {
    const double obj = std::max(gss.objective_trace[i], 0.0);
    rows.push_back({"gss", static_cast<int>(i + 1), obj,
                    rates_from_sinr(gamma1, obj, p).rsum_bps});
  }
  Rng ext(mix_seed(seed, 0xE7));
  auto sca = miso::sca_solve(si.instance, gamma1, ext);
  for (const auto& it : sca.trace) {
    const double obj = std::max(it.objective, 0.0);
    rows.push_back({"sca", it.iteration, obj, rates_from_sinr(gamma1, obj, p).rsum_bps});
  }
  return rows;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "algorithm,iteration,objective,rsum_bps\n";
  for (const auto& r : rows)
    os << r.algorithm << ',' << r.iteration << ',' << format_double(r.objective) << ','
       << format_double(r.rsum_bps) << "\n";
}

}  // namespace swiptnoma::harness
