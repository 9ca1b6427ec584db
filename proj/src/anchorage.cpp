#include "portcap/anchorage.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace portcap {

double AnchorageObservation::total_arrival_rate() const {
  double s = 0.0;
  for (const auto& c : classes) s += c.arrival_rate.per_hour();
  return s;
}

void AnchorageObservation::validate() const {
  if (classes.empty())
    throw ModelError("anchorage observation has no cargo classes");
  std::set<std::string> names;
  for (const auto& c : classes) {
    if (c.cargo_class.name.empty())
      throw ModelError("anchorage observation has an unnamed cargo class");
    if (!names.insert(c.cargo_class.name).second)
      throw ModelError("duplicate cargo class '" + c.cargo_class.name + "'");
    if (!std::isfinite(c.mean_queue_length) || c.mean_queue_length < 0.0)
      throw ModelError("negative queue length for class '" +
                       c.cargo_class.name + "'");
  }
  if (total_arrival_rate() <= 0.0)
    throw ModelError("anchorage observation has no arrivals");
}

double anchorage_mean_wait(std::span<const double> arrival_rates,
                           double service_rate) {
  double total = 0.0;
  for (double r : arrival_rates) total += r;
  if (service_rate <= 0.0) throw ModelError("zero service rate");
  double rho = total / service_rate;
  if (rho >= 1.0 - kStabilityEpsilon)
    throw ModelError("unstable anchorage regime (rho = " +
                     std::to_string(rho) + ")");
  return (total / (service_rate * service_rate)) / (1.0 - rho);
}

std::vector<double> anchorage_queue_lengths(
    std::span<const double> arrival_rates, double service_rate) {
  double wait = anchorage_mean_wait(arrival_rates, service_rate);
  std::vector<double> lengths;
  lengths.reserve(arrival_rates.size());
  for (double r : arrival_rates) lengths.push_back(r * wait);
  return lengths;
}

namespace {

double residual_at_wait(const AnchorageObservation& obs, double wait) {
  double r = 0.0;
  for (const auto& c : obs.classes) {
    double d = c.arrival_rate.per_hour() * wait - c.mean_queue_length;
    r += d * d;
  }
  return r;
}

AnchorageCapacityEstimate finish_estimate(const AnchorageObservation& obs,
                                          double mu) {
  double total = obs.total_arrival_rate();
  double rho = total / mu;
  if (rho >= 1.0 - kStabilityEpsilon)
    throw ModelError("unstable anchorage regime: no stable fit");
  AnchorageCapacityEstimate est;
  est.service_rate = Rate(mu);
  est.traffic_intensity = rho;
  est.predicted_wait_hours = (total / (mu * mu)) / (1.0 - rho);
  est.predicted_queue_lengths.reserve(obs.classes.size());
  for (const auto& c : obs.classes)
    est.predicted_queue_lengths.push_back(c.arrival_rate.per_hour() *
                                          est.predicted_wait_hours);
  est.residual = residual_at_wait(obs, est.predicted_wait_hours);
  if (obs.observed_mean_wait_hours && *obs.observed_mean_wait_hours > 0.0)
    est.observed_wait_relative_error_pct =
        (est.predicted_wait_hours - *obs.observed_mean_wait_hours) /
        *obs.observed_mean_wait_hours * 100.0;
  return est;
}

}  // namespace

AnchorageCapacityEstimate solve_port_capacity(const AnchorageObservation& obs) {
  obs.validate();
  double sum_lambda = obs.total_arrival_rate();
  double sum_lambda_sq = 0.0;
  double sum_cross = 0.0;
  for (const auto& c : obs.classes) {
    double lam = c.arrival_rate.per_hour();
    sum_lambda_sq += lam * lam;
    sum_cross += lam * c.mean_queue_length;
  }
  if (sum_cross <= 0.0)
    throw ModelError(
        "degenerate observation: no positive queue length on an arriving class");
  // Optimal predicted wait, then invert W(mu) = S / (mu (mu - S)).
  double wait_star = sum_cross / sum_lambda_sq;
  double disc = sum_lambda * sum_lambda + 4.0 * sum_lambda / wait_star;
  double mu = 0.5 * (sum_lambda + std::sqrt(disc));
  if (!std::isfinite(mu) || mu <= sum_lambda)
    throw ModelError("solver bracket failure: wait projection " +
                     std::to_string(wait_star) + " has no stable service rate");
  return finish_estimate(obs, mu);
}

double solve_port_capacity_bounded(const AnchorageObservation& obs) {
  obs.validate();
  double sum_lambda = obs.total_arrival_rate();
  double lo = sum_lambda * (1.0 + kStabilityEpsilon);
  double hi = sum_lambda * 1e3;

  auto objective = [&](double mu) {
    double rho = sum_lambda / mu;
    double wait = (sum_lambda / (mu * mu)) / (1.0 - rho);
    return residual_at_wait(obs, wait);
  };

  // The objective is a parabola in W(mu) and W is strictly decreasing in mu,
  // so it is unimodal in mu. Expand the bracket while the minimum could lie
  // beyond it.
  int expansions = 0;
  while (objective(hi) < objective(hi * 0.999) && expansions < 40) {
    hi *= 10.0;
    ++expansions;
  }
  if (expansions == 40)
    throw ModelError("solver bracket failure: objective still decreasing at mu = " +
                     std::to_string(hi));

  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = objective(c), fd = objective(d);
  while ((b - a) > 1e-12 * std::max(1.0, b)) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = objective(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace portcap
