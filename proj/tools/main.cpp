// Command-line front end: single-instance solves, Monte-Carlo sweeps, and
// the preset experiment reproductions.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "swiptnoma/baselines.hpp"
#include "swiptnoma/channel.hpp"
#include "swiptnoma/harness.hpp"
#include "swiptnoma/miso.hpp"
#include "swiptnoma/siso.hpp"
#include "swiptnoma/system.hpp"

namespace {

using namespace swiptnoma;

struct ParamFlags {
  double ps_dbm = 30.0;
  double noise_dbm = -90.0;
  bool noise_density = true;
  double gamma1 = 1.0;
  int nt = 2;
  double rician_k = 3.0;
  double bandwidth_hz = 1e6;
};

void add_param_flags(CLI::App* app, ParamFlags& pf) {
  app->add_option("--ps-dbm", pf.ps_dbm, "transmit power [dBm]");
  app->add_option("--noise-dbm", pf.noise_dbm, "noise power [dBm]");
  app->add_flag("--noise-density,!--noise-total", pf.noise_density,
                "treat noise as a per-Hz density scaled by the bandwidth");
  app->add_option("--gamma1", pf.gamma1, "user-1 linear SINR target");
  app->add_option("--nt", pf.nt, "transmit antenna count");
  app->add_option("--rician-k", pf.rician_k, "Rician K factor");
  app->add_option("--bandwidth-hz", pf.bandwidth_hz, "system bandwidth [Hz]");
}

SystemParams to_params(const ParamFlags& pf) {
  SystemParams p;
  p.transmit_power_dbm = pf.ps_dbm;
  p.noise_power_dbm = pf.noise_dbm;
  p.noise_is_density = pf.noise_density;
  p.sinr_target_gamma1 = pf.gamma1;
  p.antenna_count_nt = pf.nt;
  p.rician_k = pf.rician_k;
  p.bandwidth_hz = pf.bandwidth_hz;
  return p;
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> g;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) g.push_back(std::stod(tok));
  }
  return g;
}

int run_solve_siso(double h1, double h2, double g, double gamma1, double eps,
                   bool strict) {
  const SisoInstance inst = SisoInstance::checked(h1, h2, g);
  siso::GssOptions opt;
  opt.eps = eps;
  const auto iv = siso::feasible_beta_interval(inst, gamma1);
  const auto sol = siso::gss_solve(inst, gamma1, opt);
  std::cout << "status:     " << to_string(sol.status) << "\n";
  std::cout << "beta range: [" << iv.beta_min << ", " << iv.beta_max << "]"
            << (iv.feasible ? "" : " (empty)") << "\n";
  if (sol.status == SolveStatus::Optimal) {
    std::cout << "beta:       " << sol.beta << "\n";
    std::cout << "alpha:      " << sol.alpha << "\n";
    std::cout << "objective:  " << sol.objective << "  (user-2 SNR)\n";
    std::cout << "iterations: " << sol.iterations << "\n";
  }
  return (strict && sol.status != SolveStatus::Optimal) ? 1 : 0;
}

int run_solve_miso(const ParamFlags& pf, std::uint64_t seed, const std::string& method,
                   int grid, double tol, bool strict) {
  SystemParams params = to_params(pf);
  Rng rng(mix_seed(seed, 0));
  SampledInstance si = sample_instance(rng, params);
  std::cout << "sampled instance: nt=" << params.antenna_count_nt
            << " |h1|^2=" << si.instance.h1_vec.squaredNorm()
            << " |h2|^2=" << si.instance.h2_vec.squaredNorm() << " g=" << si.instance.g
            << "\n";
  MisoSolution sol;
  if (method == "exhaustive") {
    miso::ExhaustiveOptions opt;
    opt.grid_beta = opt.grid_x = grid;
    opt.solver.tol = tol;
    sol = miso::exhaustive_search(si.instance, params.sinr_target_gamma1, opt);
  } else {
    miso::ScaOptions opt;
    opt.solver.tol = tol;
    Rng ext(mix_seed(seed, 0xE7));
    sol = miso::sca_solve(si.instance, params.sinr_target_gamma1, ext, opt);
  }
  std::cout << "status:      " << to_string(sol.status) << "\n";
  if (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::Stationary ||
      sol.status == SolveStatus::MaxIter) {
    std::cout << "beta:        " << sol.beta << "\n";
    std::cout << "objective:   " << sol.objective << "  (user-2 SNR)\n";
    std::cout << "iterations:  " << sol.iterations << "\n";
    std::cout << "eig ratio:   " << sol.eig_ratio_lambda << "\n";
    std::cout << "extraction:  " << (sol.extraction_ok ? "ok" : "failed") << "\n";
    if (sol.extraction_ok) {
      std::cout << "w1: " << sol.w1.transpose() << "\n";
      std::cout << "w2: " << sol.w2.transpose() << "\n";
      const auto rep = check_p1_feasibility(si.instance, sol.w1, sol.w2, sol.beta,
                                            params.sinr_target_gamma1);
      std::cout << "constraint slacks: sic=" << rep.slack_sic
                << " qos=" << rep.slack_qos << " power=" << rep.slack_power << "\n";
    }
    auto r = rates_from_sinr(params.sinr_target_gamma1, std::max(sol.objective, 0.0),
                             params);
    std::cout << "rates [bit/s]: r1=" << r.r1_bps << " r2=" << r.r2_bps
              << " rsum=" << r.rsum_bps << "\n";
  }
  const bool failed = sol.status == SolveStatus::Infeasible;
  return (strict && failed) ? 1 : 0;
}

int write_records_out(const std::string& out_path,
                      const std::vector<harness::SweepRecord>& records, bool timing) {
  if (out_path.empty() || out_path == "-") {
    harness::write_csv(std::cout, records, timing);
    return 0;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    std::cerr << "cannot open output file: " << out_path << "\n";
    return 1;
  }
  harness::write_csv(f, records, timing);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cooperative SWIPT-NOMA beamforming and power-splitting toolbox"};
  app.require_subcommand(1);
  app.set_config("--config");
  app.failure_message(CLI::FailureMessage::help);

  // solve-siso
  auto* siso_cmd = app.add_subcommand("solve-siso", "solve one scalar-channel instance");
  double h1 = 1.0, h2 = 10.0, g = 2.0, gamma1 = 1.0, eps = 1e-4;
  bool strict = false;
  siso_cmd->add_option("--h1", h1, "normalized gain BS->user1")->required();
  siso_cmd->add_option("--h2", h2, "normalized gain BS->user2")->required();
  siso_cmd->add_option("--g", g, "relay link gain")->required();
  siso_cmd->add_option("--gamma1", gamma1, "user-1 linear SINR target");
  siso_cmd->add_option("--eps", eps, "golden-section bracket tolerance");
  siso_cmd->add_flag("--strict", strict, "exit 1 when infeasible");

  // solve-miso
  auto* miso_cmd = app.add_subcommand("solve-miso", "solve one sampled vector instance");
  ParamFlags miso_pf;
  std::uint64_t miso_seed = 1;
  std::string miso_method = "sca";
  int miso_grid = 101;
  double miso_tol = 1e-7;
  bool miso_strict = false;
  add_param_flags(miso_cmd, miso_pf);
  miso_cmd->add_option("--seed", miso_seed, "channel draw seed");
  miso_cmd->add_option("--method", miso_method, "sca | exhaustive")
      ->check(CLI::IsMember({"sca", "exhaustive"}));
  miso_cmd->add_option("--grid", miso_grid, "lattice points per axis (exhaustive)");
  miso_cmd->add_option("--tol", miso_tol, "conic solver tolerance");
  miso_cmd->add_flag("--strict", miso_strict, "exit 1 when infeasible");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo sweep over a parameter");
  ParamFlags sweep_pf;
  std::string variable = "power", grid_csv = "10,15,20,25,30,35,40";
  std::string strategies_csv = "coop-sca,noncoop-noma,oma-dynamic,oma-fixed";
  std::string sweep_out;
  int trials = 200, jobs = 0, exh_grid = 41;
  std::uint64_t sweep_seed = 1;
  double sweep_tol = 1e-7, rate_target = 0.5;
  bool map_rate = false, timing = false, sweep_strict = false;
  add_param_flags(sweep_cmd, sweep_pf);
  sweep_cmd->add_option("--variable", variable, "power | rate | antennas")
      ->check(CLI::IsMember({"power", "rate", "antennas"}));
  sweep_cmd->add_option("--grid", grid_csv, "comma-separated sweep values");
  sweep_cmd->add_option("--strategies", strategies_csv, "comma-separated strategy ids");
  sweep_cmd->add_option("--trials", trials, "channel draws per sweep point");
  sweep_cmd->add_option("--seed", sweep_seed, "master seed");
  sweep_cmd->add_option("--out", sweep_out, "output CSV path (default stdout)");
  sweep_cmd->add_option("--jobs", jobs, "worker threads (0 = hardware)");
  sweep_cmd->add_option("--tol", sweep_tol, "conic solver tolerance");
  sweep_cmd->add_option("--rate", rate_target, "user-1 target rate [bit/s/Hz]");
  sweep_cmd->add_flag("--map-rate", map_rate,
                      "derive per-strategy SINR targets from --rate");
  sweep_cmd->add_option("--exh-grid", exh_grid, "exhaustive lattice points per axis");
  sweep_cmd->add_flag("--timing", timing, "append wall_time_ms column");
  sweep_cmd->add_flag("--strict", sweep_strict, "exit 1 if any evaluation faulted");

  // reproduce
  auto* rep_cmd = app.add_subcommand("reproduce", "run a preset experiment");
  std::string figure;
  std::string rep_out;
  int rep_trials = 200, rep_jobs = 0, rep_grid = 0;
  std::uint64_t rep_seed = 1;
  bool rep_timing = false;
  rep_cmd->add_option("figure", figure, "one of fig3..fig9")->required();
  rep_cmd->add_option("--trials", rep_trials, "channel draws per sweep point");
  rep_cmd->add_option("--seed", rep_seed, "master seed");
  rep_cmd->add_option("--out", rep_out, "output CSV path (default <figure>.csv)");
  rep_cmd->add_option("--jobs", rep_jobs, "worker threads (0 = hardware)");
  rep_cmd->add_option("--grid", rep_grid, "override exhaustive lattice points");
  rep_cmd->add_flag("--timing", rep_timing, "append wall_time_ms column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(siso_cmd)) return run_solve_siso(h1, h2, g, gamma1, eps, strict);
    if (app.got_subcommand(miso_cmd))
      return run_solve_miso(miso_pf, miso_seed, miso_method, miso_grid, miso_tol,
                            miso_strict);

    if (app.got_subcommand(sweep_cmd)) {
      harness::ExperimentConfig cfg;
      cfg.params = to_params(sweep_pf);
      cfg.variable = variable == "rate"
                         ? harness::SweepVariable::TargetRateBpsHz
                         : variable == "antennas" ? harness::SweepVariable::AntennaCount
                                                  : harness::SweepVariable::TransmitPowerDbm;
      cfg.grid = parse_grid(grid_csv);
      std::stringstream ss(strategies_csv);
      std::string tok;
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) cfg.strategies.push_back(harness::strategy_from_id(tok));
      cfg.trials = trials;
      cfg.master_seed = sweep_seed;
      cfg.target_rate_bps_hz = rate_target;
      cfg.map_gamma_from_rate = map_rate;
      cfg.jobs = jobs;
      cfg.timing = timing;
      cfg.exhaustive.grid_beta = cfg.exhaustive.grid_x = exh_grid;
      cfg.exhaustive.solver.tol = sweep_tol;
      cfg.sca.solver.tol = sweep_tol;
      auto result = harness::run_sweep(cfg);
      const int rc = write_records_out(sweep_out, result.records, timing);
      if (rc) return rc;
      if (!sweep_out.empty()) harness::write_summary(std::cout, result.summary);
      if (sweep_strict)
        for (const auto& r : result.records)
          if (r.iterations < 0) return 1;
      return 0;
    }

    if (app.got_subcommand(rep_cmd)) {
      const std::string out = rep_out.empty() ? figure + ".csv" : rep_out;
      if (figure == "fig7") {
        SystemParams p;
        p.transmit_power_dbm = 30.0;
        p.noise_is_density = true;
        auto rows = harness::run_convergence_trace(p, {}, rep_seed);
        std::ofstream f(out, std::ios::binary);
        if (!f) {
          std::cerr << "cannot open output file: " << out << "\n";
          return 1;
        }
        harness::write_trace_csv(f, rows);
        std::cout << "wrote " << rows.size() << " trace rows to " << out << "\n";
        return 0;
      }
      auto presets = harness::figure_presets(figure);
      std::vector<harness::SweepRecord> all;
      std::vector<harness::PointSummary> summary;
      for (auto& ps : presets) {
        ps.config.trials = rep_trials;
        ps.config.master_seed = rep_seed;
        ps.config.jobs = rep_jobs;
        ps.config.timing = rep_timing;
        if (rep_grid > 0)
          ps.config.exhaustive.grid_beta = ps.config.exhaustive.grid_x = rep_grid;
        std::cout << figure << ": " << ps.description << "\n";
        auto result = harness::run_sweep(ps.config);
        all.insert(all.end(), result.records.begin(), result.records.end());
        summary.insert(summary.end(), result.summary.begin(), result.summary.end());
      }
      std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return std::tie(a.strategy, a.sweep_value, a.trial) <
               std::tie(b.strategy, b.sweep_value, b.trial);
      });
      std::ofstream f(out, std::ios::binary);
      if (!f) {
        std::cerr << "cannot open output file: " << out << "\n";
        return 1;
      }
      harness::write_csv(f, all, rep_timing);
      harness::write_summary(std::cout, summary);
      std::cout << "wrote " << all.size() << " records to " << out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
