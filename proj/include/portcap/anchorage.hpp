#pragma once

#include <optional>
#include <span>
#include <vector>

#include "portcap/domain.hpp"

namespace portcap {

/// Observed anchorage statistics for one cargo class in one window.
struct AnchorageClassObservation {
  CargoClass cargo_class;
  Rate arrival_rate;              // vessels/hour
  double mean_queue_length = 0.0; // vessels waiting (time average)
};

/// AIS-derived anchorage observation for one window: per-class arrival
/// rates and mean queue lengths, plus the pooled mean wait when waits
/// completed inside the window.
struct AnchorageObservation {
  Window window;
  std::vector<AnchorageClassObservation> classes;
  std::optional<double> observed_mean_wait_hours;

  double total_arrival_rate() const;

  /// Enforces: at least one class, rates >= 0 with one > 0, queue
  /// lengths >= 0, unique class names.
  void validate() const;
};

/// A solved port operating capacity with its predicted quality of service.
struct AnchorageCapacityEstimate {
  Rate service_rate;                          // vessels/hour
  double traffic_intensity = 0.0;             // rho < 1
  double predicted_wait_hours = 0.0;
  std::vector<double> predicted_queue_lengths; // aligned with observation classes
  double residual = 0.0;                      // sum of squared queue-length errors
  std::optional<double> observed_wait_relative_error_pct;
};

/// Mean anchorage wait (hours) for a multiclass single-server queue with
/// equal priorities: W = (sum_i lambda_i / mu^2) / (1 - sum_i lambda_i / mu).
/// Requires rho = sum(lambda)/mu < 1 - kStabilityEpsilon, otherwise throws
/// ModelError("unstable anchorage regime").
double anchorage_mean_wait(std::span<const double> arrival_rates,
                           double service_rate);

/// Per-class mean queue lengths via Little's law: L_i = lambda_i * W.
std::vector<double> anchorage_queue_lengths(std::span<const double> arrival_rates,
                                            double service_rate);

/// Fits the service rate that best reproduces the observed per-class queue
/// lengths in the least-squares sense, subject to stability.
///
/// The objective sum_i (lambda_i W(mu) - Lhat_i)^2 depends on mu only
/// through the scalar W(mu), so the optimum satisfies
///   W* = sum_i lambda_i Lhat_i / sum_i lambda_i^2
/// and mu solves mu^2 - S mu - S/W* = 0 with S = sum_i lambda_i (positive
/// root). This closed form is the default path; see
/// solve_port_capacity_bounded for the independent numeric path.
AnchorageCapacityEstimate solve_port_capacity(const AnchorageObservation& obs);

/// Bounded golden-section minimization of the same objective over
/// mu in (S*(1+eps), S*1e3], expanding the bracket if needed. Used to
/// cross-check the closed-form reduction; both agree to 1e-6 relative.
double solve_port_capacity_bounded(const AnchorageObservation& obs);

}  // namespace portcap
