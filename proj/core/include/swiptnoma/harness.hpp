#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "swiptnoma/baselines.hpp"
#include "swiptnoma/channel.hpp"
#include "swiptnoma/miso.hpp"
#include "swiptnoma/siso.hpp"
#include "swiptnoma/system.hpp"

namespace swiptnoma::harness {

enum class Strategy {
  CoopSca,
  CoopGss,
  CoopExhaustive,
  NoncoopNoma,
  OmaDynamic,
  OmaFixed,
};

const char* strategy_id(Strategy s);
Strategy strategy_from_id(const std::string& id);  // throws on unknown id

enum class SweepVariable { TransmitPowerDbm, TargetRateBpsHz, AntennaCount };

const char* sweep_variable_id(SweepVariable v);

struct ExperimentConfig {
  std::vector<Strategy> strategies;
  SweepVariable variable = SweepVariable::TransmitPowerDbm;
  std::vector<double> grid;
  int trials = 200;
  std::uint64_t master_seed = 1;
  SystemParams params;
  GeometryConfig geometry;
  /// Common user-1 target rate in bits/s/Hz. When `map_gamma_from_rate` is
  /// set, each strategy derives its own SINR target from this rate
  /// (two-stage squaring for the cooperative protocol, single-slot
  /// otherwise); OMA always consumes it directly.
  double target_rate_bps_hz = 0.5;
  bool map_gamma_from_rate = false;
  miso::ExhaustiveOptions exhaustive;
  miso::ScaOptions sca;
  siso::GssOptions gss;
  int jobs = 0;  // 0 = hardware concurrency
  bool timing = false;
  std::string label_suffix;  // appended to strategy ids in records

  void validate() const;
};

/// One row per (strategy, sweep point, trial).
struct SweepRecord {
  std::string strategy;
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double r1_bps = 0.0;
  double r2_bps = 0.0;
  double rsum_bps = 0.0;
  bool feasible = false;
  int iterations = 0;
  double eig_ratio = 0.0;
  double wall_time_ms = 0.0;
};

struct PointSummary {
  std::string strategy;
  double sweep_value = 0.0;
  double mean_rsum_bps = 0.0;  // infeasible trials contribute zero
  double feasibility = 0.0;
  int trials = 0;
};

struct SweepResult {
  std::vector<SweepRecord> records;  // sorted by (strategy, value, trial)
  std::vector<PointSummary> summary;
};

/// Runs every strategy on the identical channel draw per (point, trial).
/// Per-trial seeds are derived only from (master_seed, trial), so a power or
/// rate sweep sees common random numbers across its points.
SweepResult run_sweep(const ExperimentConfig& config);

std::string csv_header(bool timing);
void write_csv(std::ostream& os, const std::vector<SweepRecord>& records, bool timing);
void write_summary(std::ostream& os, const std::vector<PointSummary>& summary);

struct FigurePreset {
  std::string id;
  std::string description;
  ExperimentConfig config;
};

/// Presets fig3..fig9. Some figures decompose into more than one sweep
/// (different antenna counts or power levels); fig7 has a per-iteration
/// schema handled by run_convergence_trace and returns no sweep configs.
/// Throws on unknown id.
std::vector<FigurePreset> figure_presets(const std::string& id);
std::vector<std::string> figure_ids();

/// Per-iteration objective traces of the two cooperative solvers on one
/// scalar-channel draw (the fig7 preset).
struct TraceRow {
  std::string algorithm;
  int iteration = 0;
  double objective = 0.0;  // user-2 SNR at the iterate
  double rsum_bps = 0.0;
};
std::vector<TraceRow> run_convergence_trace(const SystemParams& params,
                                            const GeometryConfig& geometry,
                                            std::uint64_t seed);
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);

}  // namespace swiptnoma::harness
