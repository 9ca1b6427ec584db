#include "portcap/export_model.hpp"

#include <cmath>
#include <string>

namespace portcap {

void ExportObservation::validate() const {
  if (gate_arrival_rate.per_hour() <= 0.0 ||
      effective_yard_rate().per_hour() <= 0.0)
    throw ModelError("degenerate export observation: zero arrival rate");
  if (to_hours(dwell_time) <= 0.0)
    throw ModelError("degenerate export observation: zero dwell");
  if (gate_count && *gate_count < 1)
    throw ModelError("gate count must be positive");
}

double export_queue_length(double yard_arrival_rate, double service_rate) {
  if (service_rate <= yard_arrival_rate)
    throw ModelError("unstable export regime (mu <= lambda)");
  return yard_arrival_rate * yard_arrival_rate /
         (service_rate * (service_rate - yard_arrival_rate));
}

ExportCapacityEstimate solve_export_capacity(const ExportObservation& obs) {
  obs.validate();
  double lambda = obs.effective_yard_rate().per_hour();
  double wait = to_hours(obs.dwell_time);
  double half = 0.5 * lambda;
  double mu = half + std::sqrt(half * half + lambda / wait);

  ExportCapacityEstimate est;
  est.service_rate = Rate(mu);
  est.traffic_intensity = lambda / mu;
  est.predicted_queue_length = export_queue_length(lambda, mu);
  return est;
}

}  // namespace portcap
