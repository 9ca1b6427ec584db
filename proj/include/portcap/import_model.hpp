#pragma once

#include "portcap/domain.hpp"

namespace portcap {

/// First and second moments of the cargo batch size carried per vessel.
struct BatchMoments {
  double mean = 1.0;           // E[X], cargo units
  double second_moment = 1.0;  // E[X^2], cargo units^2

  BatchMoments() = default;
  BatchMoments(double mean, double second_moment);
};

/// E[X] = mean, E[X^2] = variance + mean^2.
BatchMoments batch_moments_from_mean_variance(double mean, double variance);

/// Terminal-side import observation for one window.
struct ImportObservation {
  Window window;
  Rate vessel_arrival_rate;  // vessels/hour
  BatchMoments batch;
  Duration dwell_time;       // observed cargo dwell in the yard

  void validate() const;
};

struct ImportCapacityEstimate {
  Rate service_rate;               // cargo/hour
  double traffic_intensity = 0.0;  // rho = lambda E[X] / mu < 1
  double predicted_queue_length = 0.0;  // cargo units
};

/// Mean cargo dwell (hours) in a batch-arrival single-server queue:
///   W = (rho/(1-rho)) * K / (lambda E[X]) - 1/mu,
/// with K = (E[X] + E[X^2]) / (2 E[X]); equivalently
/// W = K/(mu - lambda E[X]) - 1/mu. Requires rho < 1 - kStabilityEpsilon.
double import_dwell(double vessel_arrival_rate, const BatchMoments& batch,
                    double service_rate);

/// Mean cargo queue length: L = (rho/(1-rho)) * K - rho.
double import_queue_length(double vessel_arrival_rate,
                           const BatchMoments& batch, double service_rate);

/// Inverts the dwell expression: finds the unique mu > lambda E[X] with
/// import_dwell(lambda, batch, mu) equal to the observed dwell. Bisection
/// on the strictly decreasing dwell; the closed-form quadratic root
/// (solve_import_capacity_quadratic) cross-checks it to 1e-8 relative.
ImportCapacityEstimate solve_import_capacity(const ImportObservation& obs);

/// Positive root of W mu^2 - (W a + K - 1) mu - a = 0 with a = lambda E[X].
double solve_import_capacity_quadratic(double vessel_arrival_rate,
                                       const BatchMoments& batch,
                                       double dwell_hours);

}  // namespace portcap
