#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "portcap/domain.hpp"
#include "portcap/import_model.hpp"

namespace portcap {

/// Simulated network shapes.
///  - MulticlassSingleServer: per-class Poisson arrivals, one exponential
///    server, FCFS (the anchorage shape).
///  - BatchSingleServer: Poisson batch arrivals, units served one at a time
///    by one exponential server (the import shape).
///  - TandemExport: gate bank (S_c servers) -> holding -> yard, each stage
///    exponential, FCFS (the export chain).
enum class Topology { MulticlassSingleServer, BatchSingleServer, TandemExport };

/// Cargo batch size distribution for the batch topology. Every variant has
/// support on {1, 2, ...} so the batch mean is at least one unit.
struct BatchDistribution {
  enum class Kind { Deterministic, Geometric, Empirical };

  Kind kind = Kind::Deterministic;
  int size = 1;       // Deterministic
  double mean = 1.0;  // Geometric (mean >= 1; success prob 1/mean)
  std::vector<std::pair<int, double>> table;  // Empirical: (size, probability)

  static BatchDistribution deterministic(int size);
  static BatchDistribution geometric(double mean);
  static BatchDistribution empirical(std::vector<std::pair<int, double>> table);

  /// Analytic E[X], E[X^2] of the configured distribution.
  BatchMoments moments() const;

  void validate() const;
};

struct SimConfig {
  Topology topology = Topology::MulticlassSingleServer;
  std::vector<std::string> class_names;  // optional labels, multiclass only
  std::vector<double> arrival_rates;     // per class; single entry otherwise
  std::vector<double> service_rates;     // per stage
  BatchDistribution batch;               // batch topology only
  int gate_count = 0;                    // tandem only; S_c servers at stage 0
  double horizon_hours = 0.0;
  double warmup_hours = 0.0;
  std::uint64_t seed = 0;
  bool record_trace = false;
  int ci_batches = 20;  // batch-means intervals behind the 95% CIs

  void validate() const;
};

/// Statistics for one waiting line (a class at the shared server, or a
/// stage of the tandem chain). Waits and queue lengths count waiting
/// entities only, not the one in service. Half-widths are 95% batch-means
/// confidence intervals.
struct QueueStats {
  std::string label;
  double mean_wait_hours = 0.0;
  double wait_half_width = 0.0;
  double time_avg_queue = 0.0;
  double queue_half_width = 0.0;
  long wait_samples = 0;
  double measured_arrival_rate = 0.0;  // post-warmup arrivals / hour
};

struct StageStats {
  std::string label;
  double utilization = 0.0;     // busy-server time / (span * servers)
  double departure_rate = 0.0;  // post-warmup service completions / hour
  double departure_rate_half_width = 0.0;
};

/// One served entity at the first stage; used to regenerate event logs.
struct TraceRecord {
  int class_index = 0;
  double arrival_hours = 0.0;
  double service_start_hours = 0.0;  // NaN if still waiting at the horizon
};

struct SimResult {
  std::vector<QueueStats> queues;
  std::vector<StageStats> stages;
  bool stability_warning = false;  // offered load reached capacity somewhere
  bool empty_samples = false;      // some queue saw no completed waits
  std::vector<TraceRecord> trace;  // filled when config.record_trace
};

/// Runs the seeded discrete-event simulation. Deterministic: identical
/// config and seed give identical results. Statistics cover only the
/// post-warmup span; queue lengths are time averages.
SimResult run_simulation(const SimConfig& config);

}  // namespace portcap
