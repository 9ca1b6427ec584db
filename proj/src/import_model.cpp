#include "portcap/import_model.hpp"

#include <cmath>
#include <string>

namespace portcap {

BatchMoments::BatchMoments(double mean, double second_moment)
    : mean(mean), second_moment(second_moment) {
  if (!std::isfinite(mean) || mean < 1.0)
    throw ModelError("batch mean below one cargo unit");
  if (!std::isfinite(second_moment) || second_moment < mean * mean)
    throw ModelError("batch second moment below mean squared");
}

BatchMoments batch_moments_from_mean_variance(double mean, double variance) {
  if (!std::isfinite(mean) || mean < 1.0)
    throw ModelError("batch mean below one cargo unit");
  if (!std::isfinite(variance) || variance < 0.0)
    throw ModelError("batch variance must be nonnegative");
  return BatchMoments(mean, variance + mean * mean);
}

void ImportObservation::validate() const {
  if (vessel_arrival_rate.per_hour() <= 0.0)
    throw ModelError("import observation needs a positive arrival rate");
  if (to_hours(dwell_time) <= 0.0)
    throw ModelError("no feasible service rate: observed dwell must be positive");
}

namespace {

// K = (E[X] + E[X^2]) / (2 E[X]); batch cargo load a = lambda E[X].
double batch_factor(const BatchMoments& b) {
  return (b.mean + b.second_moment) / (2.0 * b.mean);
}

void check_stable(double cargo_load, double mu) {
  if (mu <= 0.0) throw ModelError("zero service rate");
  double rho = cargo_load / mu;
  if (rho >= 1.0 - kStabilityEpsilon)
    throw ModelError("unstable import regime (rho = " + std::to_string(rho) +
                     ")");
}

}  // namespace

double import_dwell(double vessel_arrival_rate, const BatchMoments& batch,
                    double service_rate) {
  double a = vessel_arrival_rate * batch.mean;
  check_stable(a, service_rate);
  return batch_factor(batch) / (service_rate - a) - 1.0 / service_rate;
}

double import_queue_length(double vessel_arrival_rate,
                           const BatchMoments& batch, double service_rate) {
  double a = vessel_arrival_rate * batch.mean;
  check_stable(a, service_rate);
  double rho = a / service_rate;
  return (rho / (1.0 - rho)) * batch_factor(batch) - rho;
}

double solve_import_capacity_quadratic(double vessel_arrival_rate,
                                       const BatchMoments& batch,
                                       double dwell_hours) {
  double a = vessel_arrival_rate * batch.mean;
  double k = batch_factor(batch);
  double b = dwell_hours * a + k - 1.0;
  return (b + std::sqrt(b * b + 4.0 * dwell_hours * a)) / (2.0 * dwell_hours);
}

ImportCapacityEstimate solve_import_capacity(const ImportObservation& obs) {
  obs.validate();
  double lambda = obs.vessel_arrival_rate.per_hour();
  double target = to_hours(obs.dwell_time);
  if (!std::isfinite(target) || target <= 0.0)
    throw ModelError("no feasible service rate: observed dwell must be positive");

  double a = lambda * obs.batch.mean;
  // Just inside the stability margin, so the dwell is still evaluable.
  double lo = a / (1.0 - 2.0 * kStabilityEpsilon);
  double hi = a * 1e3;
  // W(mu) decreases from +inf at mu -> a to 0, so bracket the root and
  // bisect. Expand upward for very short dwells.
  int expansions = 0;
  while (import_dwell(lambda, obs.batch, hi) > target && expansions < 40) {
    hi *= 10.0;
    ++expansions;
  }
  if (expansions == 40)
    throw ModelError("no feasible service rate: dwell too short to bracket");
  if (import_dwell(lambda, obs.batch, lo) < target) {
    // Dwell longer than any stable rate can produce within the margin.
    throw ModelError("unstable import regime: dwell exceeds stable range");
  }

  for (int i = 0; i < 200 && (hi - lo) > 1e-12 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (import_dwell(lambda, obs.batch, mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  double mu = 0.5 * (lo + hi);

  ImportCapacityEstimate est;
  est.service_rate = Rate(mu);
  est.traffic_intensity = a / mu;
  est.predicted_queue_length = import_queue_length(lambda, obs.batch, mu);
  return est;
}

}  // namespace portcap
