#include <doctest.h>

#include <random>

#include "portcap/yard.hpp"

using namespace portcap;

namespace {

ImportCapacityEstimate import_est(double mu, double rho, double queue) {
  return ImportCapacityEstimate{Rate(mu), rho, queue};
}

ExportCapacityEstimate export_est(double mu, double rho, double queue) {
  return ExportCapacityEstimate{Rate(mu), rho, queue};
}

}  // namespace

TEST_CASE("yard capacity from inventory and utilization") {
  CHECK(estimate_yard_capacity(100.0, 1.0).capacity == 100.0);
  CHECK(estimate_yard_capacity(50.0, 0.5).capacity == 100.0);
  // pair chosen to land on the deployed default
  auto est = estimate_yard_capacity(20166.4, 0.8);
  CHECK(est.capacity == doctest::Approx(25208.0).epsilon(1e-12));
  CHECK(est.source_inventory == 20166.4);
  CHECK(est.source_utilization == 0.8);

  CHECK_THROWS_AS(estimate_yard_capacity(100.0, 0.0), ModelError);
  CHECK_THROWS_AS(estimate_yard_capacity(100.0, 1.5), ModelError);
  CHECK_THROWS_AS(estimate_yard_capacity(-1.0, 0.5), ModelError);
}

TEST_CASE("validation row for the 2022-Q4 quarter") {
  // printed row: 5845, 16498, 22344, 88.64 vs 81.80 -> 8.36
  auto row = validate_window(import_est(52.78, 0.9032, 5845.91),
                             export_est(70.654, 0.99994, 16498.19), 25208.0,
                             81.80, "2022-Q4");
  CHECK(row.total_queue == doctest::Approx(22344.1).epsilon(1e-4));
  CHECK(row.calculated_utilization_pct == doctest::Approx(88.64).epsilon(1e-4));
  REQUIRE(row.relative_error_pct.has_value());
  CHECK(*row.relative_error_pct == doctest::Approx(8.36).epsilon(1e-3));
  CHECK(row.flag == StabilityFlag::NearCritical);
}

TEST_CASE("validation row for the 2023-Q2 quarter") {
  auto row = validate_window(import_est(61.28, 0.8751, 4388.72),
                             export_est(72.355, 0.99993, 14030.11), 25208.0,
                             73.70, "2023-Q2");
  CHECK(row.calculated_utilization_pct == doctest::Approx(73.07).epsilon(1e-4));
  CHECK(*row.relative_error_pct == doctest::Approx(-0.86).epsilon(2e-3));
}

TEST_CASE("empty yard reports no relative error") {
  auto row = validate_window(import_est(10.0, 0.2, 0.0),
                             export_est(10.0, 0.2, 0.0), 25208.0, 0.0, "w");
  CHECK(row.calculated_utilization_pct == 0.0);
  CHECK_FALSE(row.relative_error_pct.has_value());
  CHECK(row.flag == StabilityFlag::Stable);

  auto no_obs = validate_window(import_est(10.0, 0.2, 5.0),
                                export_est(10.0, 0.2, 5.0), 25208.0,
                                std::nullopt, "w");
  CHECK_FALSE(no_obs.relative_error_pct.has_value());
  CHECK_FALSE(no_obs.observed_utilization_pct.has_value());
}

TEST_CASE("utilization is additive in the two queue lengths") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 10000.0);
  for (int i = 0; i < 200; ++i) {
    double li = u(rng), le = u(rng), cap = 1000.0 + u(rng);
    auto row = validate_window(import_est(10.0, 0.5, li),
                               export_est(10.0, 0.5, le), cap, 50.0, "w");
    CHECK(row.calculated_utilization_pct ==
          doctest::Approx((li + le) / cap * 100.0).epsilon(1e-12));
    // sign convention: positive iff calculated exceeds observed
    if (row.relative_error_pct) {
      CHECK((*row.relative_error_pct > 0) ==
            (row.calculated_utilization_pct > 50.0));
    }
  }
}

TEST_CASE("stability flags follow the component intensities") {
  auto stable = validate_window(import_est(10, 0.5, 1), export_est(10, 0.5, 1),
                                100, 50, "w");
  CHECK(stable.flag == StabilityFlag::Stable);

  auto near = validate_window(import_est(10, 0.5, 1), export_est(10, 0.9995, 1),
                              100, 50, "w");
  CHECK(near.flag == StabilityFlag::NearCritical);

  auto near_import = validate_window(import_est(10, 0.9991, 1),
                                     export_est(10, 0.5, 1), 100, 50, "w");
  CHECK(near_import.flag == StabilityFlag::NearCritical);

  auto unstable_import = validate_window(import_est(10, 1.0, 1),
                                         export_est(10, 0.5, 1), 100, 50, "w");
  CHECK(unstable_import.flag == StabilityFlag::UnstableImport);

  auto unstable_export = validate_window(import_est(10, 0.5, 1),
                                         export_est(10, 1.2, 1), 100, 50, "w");
  CHECK(unstable_export.flag == StabilityFlag::UnstableExport);

  CHECK(std::string(to_string(StabilityFlag::NearCritical)) == "near-critical");
}

TEST_CASE("bad capacity is rejected") {
  CHECK_THROWS_AS(validate_window(import_est(10, 0.5, 1), export_est(10, 0.5, 1),
                                  0.0, 50, "w"),
                  ModelError);
}
