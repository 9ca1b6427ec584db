#pragma once

#include <optional>

#include "portcap/domain.hpp"

namespace portcap {

/// Terminal-side export observation for one window. The yard arrival rate
/// defaults to the gate arrival rate: departures from the gate stage are
/// Poisson with the arrival rate, so the rate passes through unchanged.
/// The gate count is carried for the simulator only.
struct ExportObservation {
  Window window;
  Rate gate_arrival_rate;               // cargo/hour at the truck gate
  std::optional<Rate> yard_arrival_rate;
  Duration dwell_time;                  // observed export dwell in the yard
  std::optional<int> gate_count;

  Rate effective_yard_rate() const {
    return yard_arrival_rate ? *yard_arrival_rate : gate_arrival_rate;
  }

  void validate() const;
};

struct ExportCapacityEstimate {
  Rate service_rate;               // cargo/hour
  double traffic_intensity = 0.0;  // rho = lambda/mu, < 1 by construction
  double predicted_queue_length = 0.0;  // cargo units
};

/// Closed-form export capacity:
///   mu = lambda/2 + sqrt((lambda/2)^2 + lambda/W),
/// which always exceeds lambda, then L from export_queue_length (equal to
/// lambda * W by construction).
ExportCapacityEstimate solve_export_capacity(const ExportObservation& obs);

/// Mean export cargo queue length: L = lambda^2 / (mu (mu - lambda)).
/// Requires mu > lambda strictly.
double export_queue_length(double yard_arrival_rate, double service_rate);

}  // namespace portcap
