#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "leofl/config.hpp"
#include "leofl/contact.hpp"
#include "leofl/learn.hpp"

namespace leofl {

// One output row. Numeric fields that do not apply to a row's event kind
// hold -1 (accuracy is in [0, 1] on eval rows, so -1 is unambiguous).
struct MetricsRow {
  enum class Event { kVisit, kAggregate, kEval };
  double sim_time_s = 0.0;
  Event event = Event::kEval;
  std::int64_t round_index = 0;
  int satellite_id = -1;
  std::int64_t staleness = -1;
  double test_accuracy = -1.0;
  double test_loss = -1.0;
  double global_update_norm = -1.0;  // L2 norm of the aggregation's model step
};

struct SimResult {
  std::vector<MetricsRow> rows;
  std::int64_t aggregations = 0;
  double final_accuracy = 0.0;
  double final_loss = 0.0;
  bool truncated = false;  // synchronous run ended mid-round
};

// Full pipeline: geometry, contact schedule, data, then the federated run.
SimResult run_simulation(const RunConfig& cfg);

// Same, but on a precomputed visit stream (the schedule only depends on
// the geometry, so sweeps share it across strategies and seeds).
SimResult run_on_schedule(const RunConfig& cfg, const std::vector<Visit>& visits);

struct SweepSummaryRow {
  std::string strategy;
  int seeds = 0;
  double final_acc_mean = -1.0;
  double final_acc_std = -1.0;
  double time_to_target_mean_s = -1.0;  // over runs that reached the target
  double time_to_target_std_s = -1.0;
  int reached_target = 0;
  double aggregations_mean = -1.0;
  int truncated_runs = 0;
  int failed_runs = 0;
};

// Runs every (strategy, seed) cell on a shared visit schedule. Cell
// failures are recorded (and optionally reported through cell_errors)
// without aborting the sweep.
std::vector<SweepSummaryRow> compare_sweep(const RunConfig& base,
                                           const std::vector<StrategyKind>& strategies,
                                           const std::vector<std::uint64_t>& seeds,
                                           double target_accuracy,
                                           std::vector<std::string>* cell_errors = nullptr);

// First eval time at which accuracy reached the target, or -1 if never.
double time_to_target(const std::vector<MetricsRow>& rows, double target_accuracy);

// CSV writers; reals use 6-decimal fixed point.
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
void write_windows_csv(std::ostream& out, const std::vector<ContactEvent>& windows);
void write_dataset_csv(std::ostream& out, const Dataset& ds);
void write_sweep_csv(std::ostream& out, const std::vector<SweepSummaryRow>& rows);

}  // namespace leofl
