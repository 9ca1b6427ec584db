#include <doctest.h>

#include <cmath>
#include <random>

#include "portcap/import_model.hpp"

using namespace portcap;

namespace {

// Printed quarterly batch statistics used across these tests.
const BatchMoments kHoustonBatch = batch_moments_from_mean_variance(851.2, 341458.56);

ImportObservation make_observation(double lambda, const BatchMoments& batch,
                                   Duration dwell) {
  return ImportObservation{Window::from_hours("test", 2160.0), Rate(lambda),
                           batch, dwell};
}

}  // namespace

TEST_CASE("batch moments from mean and variance") {
  CHECK(kHoustonBatch.mean == 851.2);
  CHECK(kHoustonBatch.second_moment == doctest::Approx(1.066e6).epsilon(1e-9));

  auto unit = batch_moments_from_mean_variance(1.0, 0.0);
  CHECK(unit.mean == 1.0);
  CHECK(unit.second_moment == 1.0);

  auto small = batch_moments_from_mean_variance(2.0, 1.0);
  CHECK(small.mean == 2.0);
  CHECK(small.second_moment == 5.0);

  CHECK_THROWS_WITH_AS(batch_moments_from_mean_variance(0.5, 1.0),
                       doctest::Contains("batch mean below one cargo unit"),
                       ModelError);
  CHECK_THROWS_AS(batch_moments_from_mean_variance(2.0, -1.0), ModelError);
  CHECK_THROWS_AS(BatchMoments(2.0, 3.0), ModelError);  // E[X^2] < E[X]^2
}

TEST_CASE("import dwell matches the printed quarterly value") {
  // 2022-Q4 row: 0.056 vessels/h, mu = 52.78 -> about 5.11 days
  double w = import_dwell(0.056, kHoustonBatch, 52.78);
  CHECK(w / 24.0 == doctest::Approx(5.11).epsilon(1e-3));
}

TEST_CASE("unit batches reduce the dwell to the M/M/1 queue wait") {
  BatchMoments unit(1.0, 1.0);
  CHECK(import_dwell(0.5, unit, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(import_queue_length(0.5, unit, 1.0) ==
        doctest::Approx(0.5).epsilon(1e-12));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int i = 0; i < 400; ++i) {
    double lambda = u(rng);
    double mu = lambda * (1.05 + u(rng));
    double mm1_wait = lambda / (mu * (mu - lambda));
    double mm1_queue = lambda * lambda / (mu * (mu - lambda));
    CHECK(std::abs(import_dwell(lambda, unit, mu) - mm1_wait) <=
          1e-12 * std::max(1.0, mm1_wait));
    CHECK(std::abs(import_queue_length(lambda, unit, mu) - mm1_queue) <=
          1e-12 * std::max(1.0, mm1_queue));
  }
}

TEST_CASE("dwell vanishes as service gets fast") {
  CHECK(import_dwell(0.056, kHoustonBatch, 1e9) ==
        doctest::Approx(0.0).epsilon(1e-6));
  CHECK(import_dwell(0.5, BatchMoments(1, 1), 1e12) < 1e-11);
}

TEST_CASE("import queue length matches the printed quarterly values") {
  // evaluated at the two-decimal service rates the table prints, so the
  // queue lengths land within the table's own rounding slack
  CHECK(std::abs(import_queue_length(0.056, kHoustonBatch, 52.78) - 5845) < 5);
  CHECK(std::abs(import_queue_length(0.058, kHoustonBatch, 57.12) - 3993) < 5);
}

TEST_CASE("unstable import regimes are rejected") {
  CHECK_THROWS_WITH_AS(import_dwell(0.1, kHoustonBatch, 50.0),
                       doctest::Contains("unstable import regime"), ModelError);
  CHECK_THROWS_AS(import_queue_length(0.1, kHoustonBatch, 85.12), ModelError);
}

TEST_CASE("capacity solve reproduces printed quarterly rows") {
  auto q4 = solve_import_capacity(
      make_observation(0.056, kHoustonBatch, Duration::days(5.11)));
  CHECK(q4.service_rate.per_hour() == doctest::Approx(52.78).epsilon(1e-3));
  CHECK(q4.traffic_intensity == doctest::Approx(0.90).epsilon(5e-3));
  CHECK(q4.predicted_queue_length == doctest::Approx(5845).epsilon(1e-3));

  auto q2 = solve_import_capacity(
      make_observation(0.063, kHoustonBatch, Duration::days(3.41)));
  CHECK(q2.service_rate.per_hour() == doctest::Approx(61.29).epsilon(1e-3));
  CHECK(q2.traffic_intensity == doctest::Approx(0.87).epsilon(1e-2));
}

TEST_CASE("unit-batch solve inverts the M/M/1 wait") {
  auto est = solve_import_capacity(
      make_observation(0.5, BatchMoments(1, 1), Duration::hours(1.0)));
  CHECK(est.service_rate.per_hour() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("solve round-trips through the forward dwell") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  std::uniform_real_distribution<double> mscale(1.0, 400.0);
  for (int i = 0; i < 200; ++i) {
    double mean = mscale(rng);
    double variance = mean * mean * u(rng);
    auto batch = batch_moments_from_mean_variance(mean, variance);
    double lambda = u(rng);
    double dwell = 1.0 + 300.0 * u(rng);
    auto est = solve_import_capacity(
        make_observation(lambda, batch, Duration::hours(dwell)));
    double back = import_dwell(lambda, batch, est.service_rate.per_hour());
    CHECK(std::abs(back - dwell) / dwell < 1e-8);

    // bisection and quadratic routes agree
    double quad = solve_import_capacity_quadratic(lambda, batch, dwell);
    CHECK(std::abs(quad - est.service_rate.per_hour()) /
              est.service_rate.per_hour() <
          1e-8);

    // system-level Little identity at the solved point
    double a = lambda * batch.mean;
    double lhs = est.predicted_queue_length + est.traffic_intensity;
    double rhs = a * (dwell + 1.0 / est.service_rate.per_hour());
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("dwell is strictly decreasing in the service rate") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int i = 0; i < 200; ++i) {
    double lambda = u(rng);
    auto batch = batch_moments_from_mean_variance(1.0 + 50.0 * u(rng),
                                                  100.0 * u(rng));
    double a = lambda * batch.mean;
    double mu1 = a * (1.05 + u(rng));
    double mu2 = mu1 * 1.1;
    CHECK(import_dwell(lambda, batch, mu2) < import_dwell(lambda, batch, mu1));
  }
}

TEST_CASE("shorter observed dwell means larger capacity") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int i = 0; i < 100; ++i) {
    auto batch = batch_moments_from_mean_variance(1.0 + 100.0 * u(rng),
                                                  500.0 * u(rng));
    double lambda = u(rng);
    double dwell = 5.0 + 100.0 * u(rng);
    auto slow = solve_import_capacity(
        make_observation(lambda, batch, Duration::hours(dwell)));
    auto fast = solve_import_capacity(
        make_observation(lambda, batch, Duration::hours(dwell * 0.5)));
    CHECK(fast.service_rate.per_hour() > slow.service_rate.per_hour());
  }
}

TEST_CASE("infeasible observations are rejected") {
  CHECK_THROWS_WITH_AS(
      solve_import_capacity(
          make_observation(0.056, kHoustonBatch, Duration::hours(0.0))),
      doctest::Contains("no feasible service rate"), ModelError);
  CHECK_THROWS_AS(solve_import_capacity(make_observation(
                      0.0, kHoustonBatch, Duration::days(5.0))),
                  ModelError);
}
